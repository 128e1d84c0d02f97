//! Periodic lattice topologies and their subspace geometry.

mod pegasus;
mod subspace;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

pub use pegasus::{
    internal_partner, nice_cell, nice_qubit, standard_graph, PegasusCoord, CELL_SIZE, HORIZONTAL_OFFSETS,
    VERTICAL_OFFSETS,
};
pub use subspace::{enumerate_subspaces, Offset, PegasusRegion, SubspaceSelection, SubspaceShape};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Cubic,
    ToricPegasus,
}

impl LatticeKind {
    /// Vertex degree of the periodic lattice.
    pub fn connectivity(self) -> usize {
        match self {
            LatticeKind::Cubic => 6,
            LatticeKind::ToricPegasus => 15,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Cubic => "cubic",
            LatticeKind::ToricPegasus => "pegasus",
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic" => Ok(LatticeKind::Cubic),
            "pegasus" | "toric-pegasus" => Ok(LatticeKind::ToricPegasus),
            _ => Err(Error::InvalidArgument(format!("unknown lattice kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubicCoord {
    pub i1: u32,
    pub i2: u32,
    pub i3: u32,
}

impl CubicCoord {
    pub const fn new(i1: u32, i2: u32, i3: u32) -> Self {
        Self { i1, i2, i3 }
    }
}

impl fmt::Display for CubicCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.i1, self.i2, self.i3)
    }
}

impl FromStr for CubicCoord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<u32> = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad cubic coordinate '{s}': {e}")))?;
        match parts[..] {
            [i1, i2, i3] => Ok(Self { i1, i2, i3 }),
            _ => Err(Error::InvalidArgument(format!("cubic coordinate needs 3 components: '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Cubic(CubicCoord),
    Pegasus(PegasusCoord),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Cubic(c) => c.fmt(f),
            Coord::Pegasus(c) => c.fmt(f),
        }
    }
}

/// An immutable periodic lattice: cubic `L×L×L` or toric-Pegasus `24L²`.
///
/// Vertex ids are dense and follow lexicographic coordinate order.
#[derive(Debug, Clone)]
pub struct LatticeTopology {
    kind: LatticeKind,
    scale: usize,
    graph: Arc<Graph>,
}

impl LatticeTopology {
    /// Periodic simple cubic lattice. `L >= 3` keeps the six wrap-around
    /// neighbours distinct.
    pub fn cubic(l: usize) -> Result<Self> {
        if l < 3 {
            return Err(Error::Lattice(format!(
                "cubic lattice needs L >= 3 (got {l}); smaller L folds +1 and -1 neighbours onto one edge"
            )));
        }
        let n = l * l * l;
        let id = |a: usize, b: usize, c: usize| ((a * l + b) * l + c) as u32;
        let mut edges = Vec::with_capacity(3 * n);
        for a in 0..l {
            for b in 0..l {
                for c in 0..l {
                    let v = id(a, b, c);
                    edges.push((v, id((a + 1) % l, b, c)));
                    edges.push((v, id(a, (b + 1) % l, c)));
                    edges.push((v, id(a, b, (c + 1) % l)));
                }
            }
        }
        Ok(Self { kind: LatticeKind::Cubic, scale: l, graph: Arc::new(Graph::new(n, edges)?) })
    }

    /// Toric-Pegasus lattice: P[L+1] with column `w = L` contracted onto
    /// `w = 0` and external couplers added across the `z` boundary.
    ///
    /// Requires `L >= 3`; at `L = 2` the added boundary couplers coincide
    /// with existing ones and the lattice loses its 15-regularity.
    pub fn toric_pegasus(l: usize) -> Result<Self> {
        if l < 3 {
            return Err(Error::Lattice(format!("toric-Pegasus lattice needs L >= 3 (got {l}) to stay 15-regular")));
        }
        let (_, std_edges) = standard_graph(l + 1, false);
        let lu = l as u32;
        let fold = |c: PegasusCoord| PegasusCoord { w: if c.w == lu { 0 } else { c.w }, ..c };
        let mut edges: Vec<(u32, u32)> =
            std_edges.into_iter().map(|(a, b)| (pegasus_id(l, fold(a)), pegasus_id(l, fold(b)))).collect();
        for u in 0..2 {
            for w in 0..lu {
                for k in 0..12 {
                    edges.push((
                        pegasus_id(l, PegasusCoord::new(u, w, k, 0)),
                        pegasus_id(l, PegasusCoord::new(u, w, k, lu - 1)),
                    ));
                }
            }
        }
        // rows w = 0 and w = L carry the same external and odd couplers
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let n = CELL_SIZE * l * l;
        Ok(Self { kind: LatticeKind::ToricPegasus, scale: l, graph: Arc::new(Graph::new(n, edges)?) })
    }

    pub fn build(kind: LatticeKind, l: usize) -> Result<Self> {
        match kind {
            LatticeKind::Cubic => Self::cubic(l),
            LatticeKind::ToricPegasus => Self::toric_pegasus(l),
        }
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn connectivity(&self) -> usize {
        self.kind.connectivity()
    }

    /// Neighbours of every vertex in an order that displacements preserve:
    /// entry `v * k + r` is the adjacency index of the rank-`r` neighbour of
    /// `v`, and every displacement maps it to the rank-`r` neighbour of the
    /// image of `v`.
    pub fn neighbor_ranks(&self) -> Vec<u8> {
        let k = self.connectivity();
        let mut out = Vec::with_capacity(self.graph.num_vertices() * k);
        for v in 0..self.graph.num_vertices() {
            let nbrs = self.graph.neighbors(v);
            let mut order: Vec<u8> = (0..nbrs.len() as u8).collect();
            order.sort_by_key(|&i| self.relative_position(v, nbrs[i as usize] as usize));
            out.extend(order);
        }
        out
    }

    /// Where `n` sits relative to `v`, in coordinates that displacements
    /// shift uniformly; unique among the neighbours of `v` for `L >= 3`.
    fn relative_position(&self, v: usize, n: usize) -> [u32; 4] {
        let l = self.scale as u32;
        let d = |from: u32, to: u32| (to + l - from) % l;
        match (self.coord(v), self.coord(n)) {
            (Coord::Cubic(a), Coord::Cubic(b)) => [d(a.i1, b.i1), d(a.i2, b.i2), d(a.i3, b.i3), 0],
            (Coord::Pegasus(a), Coord::Pegasus(b)) => {
                // vertical qubits move by (w, z) += (dx, dy), horizontal ones
                // by (z, w) += (dx, dy)
                let xy = |c: PegasusCoord| if c.u == 0 { (c.w, c.z) } else { (c.z, c.w) };
                let ((xa, ya), (xb, yb)) = (xy(a), xy(b));
                [b.u * 12 + b.k, d(xa, xb), d(ya, yb), 0]
            }
            _ => unreachable!("one lattice has one coordinate kind"),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn coord(&self, id: usize) -> Coord {
        let l = self.scale;
        match self.kind {
            LatticeKind::Cubic => {
                Coord::Cubic(CubicCoord::new((id / (l * l)) as u32, (id / l % l) as u32, (id % l) as u32))
            }
            LatticeKind::ToricPegasus => {
                let z = id % l;
                let rest = id / l;
                let k = rest % 12;
                let rest = rest / 12;
                Coord::Pegasus(PegasusCoord::new((rest / l) as u32, (rest % l) as u32, k as u32, z as u32))
            }
        }
    }

    pub fn id_of(&self, coord: &Coord) -> Option<usize> {
        let l = self.scale as u32;
        match (self.kind, coord) {
            (LatticeKind::Cubic, Coord::Cubic(c)) => (c.i1 < l && c.i2 < l && c.i3 < l)
                .then(|| ((c.i1 as usize * self.scale) + c.i2 as usize) * self.scale + c.i3 as usize),
            (LatticeKind::ToricPegasus, Coord::Pegasus(c)) => {
                (c.u < 2 && c.w < l && c.k < 12 && c.z < l).then(|| pegasus_id(self.scale, *c) as usize)
            }
            _ => None,
        }
    }

    /// Parses a coordinate in this lattice's text form.
    pub fn parse_coord(&self, s: &str) -> Result<Coord> {
        let coord = match self.kind {
            LatticeKind::Cubic => Coord::Cubic(s.parse()?),
            LatticeKind::ToricPegasus => Coord::Pegasus(s.parse()?),
        };
        if self.id_of(&coord).is_none() {
            return Err(Error::InvalidArgument(format!(
                "coordinate {s} outside {} lattice of scale {}",
                self.kind, self.scale
            )));
        }
        Ok(coord)
    }

    /// Image of vertex `id` under a lattice displacement.
    pub fn displace(&self, id: usize, offset: &Offset) -> usize {
        let l = self.scale as u32;
        match (self.coord(id), offset) {
            (Coord::Cubic(c), Offset::Cubic([a, b, d])) => {
                let c = CubicCoord::new((c.i1 + *a as u32) % l, (c.i2 + *b as u32) % l, (c.i3 + *d as u32) % l);
                self.id_of(&Coord::Cubic(c)).expect("in range")
            }
            (Coord::Pegasus(c), Offset::Pegasus([dx, dy])) => {
                let (dx, dy) = (*dx as u32, *dy as u32);
                let moved = if c.u == 0 {
                    PegasusCoord::new(0, (c.w + dx) % l, c.k, (c.z + dy) % l)
                } else {
                    PegasusCoord::new(1, (c.w + dy) % l, c.k, (c.z + dx) % l)
                };
                pegasus_id(self.scale, moved) as usize
            }
            _ => panic!("offset kind does not match lattice kind"),
        }
    }

    /// All distinct displacements of the lattice.
    pub fn offsets(&self) -> Vec<Offset> {
        let l = self.scale;
        match self.kind {
            LatticeKind::Cubic => (0..l * l * l).map(|i| Offset::Cubic([i / (l * l), i / l % l, i % l])).collect(),
            LatticeKind::ToricPegasus => (0..l * l).map(|i| Offset::Pegasus([i / l, i % l])).collect(),
        }
    }

    /// Writes the topology as text: a header, one line per vertex and one per
    /// edge (by coordinates).
    pub fn export<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# lattice-topology v1")?;
        writeln!(out, "kind {}", self.kind)?;
        writeln!(out, "scale {}", self.scale)?;
        writeln!(out, "vertices {}", self.num_vertices())?;
        writeln!(out, "edges {}", self.graph.num_edges())?;
        for v in 0..self.num_vertices() {
            writeln!(out, "v {} {}", v, self.coord(v))?;
        }
        for &(a, b) in self.graph.edges() {
            writeln!(out, "e {} {}", self.coord(a as usize), self.coord(b as usize))?;
        }
        Ok(())
    }
}

fn pegasus_id(l: usize, c: PegasusCoord) -> u32 {
    let l = l as u32;
    ((c.u * l + c.w) * 12 + c.k) * l + c.z
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn edge_set(t: &LatticeTopology) -> HashSet<(u32, u32)> {
        t.graph().edges().iter().copied().collect()
    }

    fn assert_automorphic(t: &LatticeTopology) {
        let edges = edge_set(t);
        for off in t.offsets() {
            for &(a, b) in t.graph().edges() {
                let (x, y) = (t.displace(a as usize, &off) as u32, t.displace(b as usize, &off) as u32);
                let e = if x < y { (x, y) } else { (y, x) };
                assert!(edges.contains(&e), "{off:?} breaks edge {a}-{b}");
            }
        }
    }

    #[test]
    fn cubic_counts_and_regularity() {
        for l in 3..=8 {
            let t = LatticeTopology::cubic(l).unwrap();
            assert_eq!(t.num_vertices(), l * l * l);
            assert_eq!(t.graph().num_edges(), 3 * l * l * l);
            assert!((0..t.num_vertices()).all(|v| t.graph().degree(v) == 6));
        }
        assert_eq!(LatticeTopology::cubic(18).unwrap().num_vertices(), 5832);
    }

    #[test]
    fn cubic_wraps_modulo_l() {
        let t = LatticeTopology::cubic(4).unwrap();
        let a = t.id_of(&Coord::Cubic(CubicCoord::new(3, 0, 0))).unwrap();
        let b = t.id_of(&Coord::Cubic(CubicCoord::new(0, 0, 0))).unwrap();
        assert!(t.graph().find_edge(a, b).is_some());
    }

    #[test]
    fn small_lattices_rejected() {
        assert!(LatticeTopology::cubic(2).is_err());
        assert!(LatticeTopology::toric_pegasus(2).is_err());
        assert!(LatticeTopology::toric_pegasus(1).is_err());
    }

    #[test]
    fn pegasus_counts_and_regularity() {
        for l in 3..=8 {
            let t = LatticeTopology::toric_pegasus(l).unwrap();
            assert_eq!(t.num_vertices(), 24 * l * l);
            assert_eq!(t.graph().num_edges(), 180 * l * l);
            assert!((0..t.num_vertices()).all(|v| t.graph().degree(v) == 15));
        }
        assert_eq!(LatticeTopology::toric_pegasus(22).unwrap().num_vertices(), 11616);
    }

    #[test]
    fn pegasus_matches_modular_rule() {
        // Independent construction: every rule taken modulo L directly.
        let l = 4usize;
        let t = LatticeTopology::toric_pegasus(l).unwrap();
        let li = l as i64;
        let m = |x: i64| x.rem_euclid(li) as u32;
        let mut expect = HashSet::new();
        let mut add = |a: PegasusCoord, b: PegasusCoord| {
            let (x, y) = (pegasus_id(l, a), pegasus_id(l, b));
            expect.insert(if x < y { (x, y) } else { (y, x) });
        };
        for u in 0..2 {
            for w in 0..l as u32 {
                for k in 0..12 {
                    for z in 0..l as u32 {
                        add(PegasusCoord::new(u, w, k, z), PegasusCoord::new(u, w, k, m(z as i64 + 1)));
                        if k % 2 == 0 {
                            add(PegasusCoord::new(u, w, k, z), PegasusCoord::new(u, w, k + 1, z));
                        }
                        if u == 0 {
                            for kk in 0..12 {
                                let (pw, pz) = internal_partner(w as i64, k, z as i64, kk);
                                add(PegasusCoord::new(0, w, k, z), PegasusCoord::new(1, m(pw), kk, m(pz)));
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(edge_set(&t), expect);
    }

    #[test]
    fn displacements_are_automorphisms() {
        for l in 3..=4 {
            assert_automorphic(&LatticeTopology::cubic(l).unwrap());
            assert_automorphic(&LatticeTopology::toric_pegasus(l).unwrap());
        }
    }

    #[test]
    fn coord_round_trip() {
        for t in [LatticeTopology::cubic(5).unwrap(), LatticeTopology::toric_pegasus(3).unwrap()] {
            for v in 0..t.num_vertices() {
                let c = t.coord(v);
                assert_eq!(t.id_of(&c), Some(v));
                assert_eq!(t.parse_coord(&c.to_string()).unwrap(), c);
            }
        }
    }

    #[test]
    fn export_lists_every_vertex_and_edge() {
        let t = LatticeTopology::cubic(3).unwrap();
        let mut buf = Vec::new();
        t.export(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# lattice-topology v1\nkind cubic\nscale 3\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 27);
        assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 81);
    }
}
