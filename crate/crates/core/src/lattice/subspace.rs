//! Subspace shapes, their placements on a lattice, and boundary sets.

use std::fmt;
use std::str::FromStr;

use super::{nice_qubit, standard_graph, Coord, CubicCoord, LatticeKind, LatticeTopology, PegasusCoord};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Lattice displacement: `(d1, d2, d3)` on the cubic lattice, a cell offset
/// `(dx, dy)` on the toric-Pegasus lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Offset {
    Cubic([usize; 3]),
    Pegasus([usize; 2]),
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Offset::Cubic([a, b, c]) => write!(f, "{a},{b},{c}"),
            Offset::Pegasus([x, y]) => write!(f, "{x},{y}"),
        }
    }
}

/// Square Pegasus regions of `m_s × m_s` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PegasusRegion {
    /// The nice-cell tiling: three K4,4 tiles per cell, `24 m_s²` qubits.
    Nice(usize),
    /// Every fabric qubit of the standard graph P[m_s + 1].
    Fabric(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubspaceShape {
    Cuboid([usize; 3]),
    Pegasus(PegasusRegion),
}

impl SubspaceShape {
    pub fn lattice_kind(&self) -> LatticeKind {
        match self {
            SubspaceShape::Cuboid(_) => LatticeKind::Cubic,
            SubspaceShape::Pegasus(_) => LatticeKind::ToricPegasus,
        }
    }

    /// Number of variables covered.
    pub fn size(&self) -> usize {
        match *self {
            SubspaceShape::Cuboid([a, b, c]) => a * b * c,
            SubspaceShape::Pegasus(PegasusRegion::Nice(m)) => 24 * m * m,
            SubspaceShape::Pegasus(PegasusRegion::Fabric(m)) => 24 * m * m + 24 * m - 8 * m,
        }
    }

    /// The three axis rotations of a cuboid, deduplicated. Pegasus regions
    /// are returned unchanged.
    pub fn rotations(&self) -> Vec<SubspaceShape> {
        match *self {
            SubspaceShape::Cuboid([a, b, c]) => {
                let mut out = Vec::new();
                for s in [[a, b, c], [b, c, a], [c, a, b]] {
                    let shape = SubspaceShape::Cuboid(s);
                    if !out.contains(&shape) {
                        out.push(shape);
                    }
                }
                out
            }
            other => vec![other],
        }
    }

    pub fn check_fits(&self, topology: &LatticeTopology) -> Result<()> {
        let l = topology.scale();
        let reason = match *self {
            _ if self.lattice_kind() != topology.kind() => {
                Some(format!("shape is for {} lattices, not {}", self.lattice_kind(), topology.kind()))
            }
            SubspaceShape::Cuboid(ext) if ext.iter().any(|&e| e == 0 || e > l) => {
                Some(format!("every extent must lie in 1..={l}"))
            }
            SubspaceShape::Pegasus(PegasusRegion::Nice(m)) if m == 0 || m > l => {
                Some(format!("cell extent must lie in 1..={l}"))
            }
            SubspaceShape::Pegasus(PegasusRegion::Fabric(m)) if m == 0 || m + 1 > l => {
                Some(format!("fabric extent m_s needs m_s + 1 <= {l}"))
            }
            _ => None,
        };
        match reason {
            Some(reason) => Err(Error::Shape { shape: self.to_string(), reason }),
            None => Ok(()),
        }
    }

    /// Member coordinates of the placement at the zero offset, in canonical
    /// variable order (ascending vertex id).
    pub fn relative_coords(&self, topology: &LatticeTopology) -> Result<Vec<Coord>> {
        Ok(self.origin_members(topology)?.into_iter().map(|v| topology.coord(v as usize)).collect())
    }

    /// Vertex ids of the placement at the zero offset, ascending.
    pub fn origin_members(&self, topology: &LatticeTopology) -> Result<Vec<u32>> {
        self.check_fits(topology)?;
        let l = topology.scale() as u32;
        let id = |c: Coord| topology.id_of(&c).expect("coordinate in range") as u32;
        let mut members: Vec<u32> = match *self {
            SubspaceShape::Cuboid([a, b, c]) => {
                let mut v = Vec::with_capacity(a * b * c);
                for i1 in 0..a as u32 {
                    for i2 in 0..b as u32 {
                        for i3 in 0..c as u32 {
                            v.push(id(Coord::Cubic(CubicCoord::new(i1, i2, i3))));
                        }
                    }
                }
                v
            }
            SubspaceShape::Pegasus(PegasusRegion::Nice(m)) => {
                let mut v = Vec::with_capacity(24 * m * m);
                for x in 0..m as u32 {
                    for y in 0..m as u32 {
                        for t in 0..3 {
                            for u in 0..2 {
                                for j in 0..4 {
                                    let q = nice_qubit(x, y, t, u, j);
                                    v.push(id(Coord::Pegasus(PegasusCoord { w: q.w % l, ..q })));
                                }
                            }
                        }
                    }
                }
                v
            }
            SubspaceShape::Pegasus(PegasusRegion::Fabric(m)) => {
                standard_graph(m + 1, true).0.into_iter().map(|q| id(Coord::Pegasus(q))).collect()
            }
        };
        members.sort_unstable();
        Ok(members)
    }
}

impl fmt::Display for SubspaceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceShape::Cuboid([a, b, c]) => write!(f, "{a}x{b}x{c}"),
            SubspaceShape::Pegasus(PegasusRegion::Nice(m)) => write!(f, "nice{m}"),
            SubspaceShape::Pegasus(PegasusRegion::Fabric(m)) => write!(f, "fabric{m}"),
        }
    }
}

impl FromStr for SubspaceShape {
    type Err = Error;

    /// Accepts `AxBxC`, `niceM` and `fabricM`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad shape '{s}' (expected AxBxC, niceM or fabricM)"));
        let s = s.trim();
        if let Some(m) = s.strip_prefix("nice") {
            return Ok(SubspaceShape::Pegasus(PegasusRegion::Nice(m.parse().map_err(|_| bad())?)));
        }
        if let Some(m) = s.strip_prefix("fabric") {
            return Ok(SubspaceShape::Pegasus(PegasusRegion::Fabric(m.parse().map_err(|_| bad())?)));
        }
        let parts: Vec<usize> =
            s.split('x').map(|p| p.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        match parts[..] {
            [a, b, c] => Ok(SubspaceShape::Cuboid([a, b, c])),
            _ => Err(bad()),
        }
    }
}

/// A concrete region `R` together with its exterior boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceSelection {
    offset: Option<Offset>,
    members: Vec<u32>,
    boundary: Vec<u32>,
}

impl SubspaceSelection {
    /// Region from an explicit member list; the boundary is derived from the
    /// graph. Members keep the given order, which defines variable order in
    /// subproblems.
    pub fn from_members(graph: &Graph, members: Vec<u32>) -> Result<Self> {
        Self::build(graph, members, None)
    }

    /// Placement of origin members displaced by `offset`.
    pub fn at(topology: &LatticeTopology, origin: &[u32], offset: Offset) -> Self {
        let members = origin.iter().map(|&v| topology.displace(v as usize, &offset) as u32).collect();
        Self::build(topology.graph(), members, Some(offset)).expect("displacement is a bijection")
    }

    fn build(graph: &Graph, members: Vec<u32>, offset: Option<Offset>) -> Result<Self> {
        let n = graph.num_vertices();
        let mut mark = vec![0u8; n];
        for &v in &members {
            let slot = mark
                .get_mut(v as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("member {v} outside graph of {n} vertices")))?;
            if *slot != 0 {
                return Err(Error::InvalidArgument(format!("member {v} listed twice")));
            }
            *slot = 1;
        }
        let mut boundary = Vec::new();
        for &v in &members {
            for &w in graph.neighbors(v as usize) {
                if mark[w as usize] == 0 {
                    mark[w as usize] = 2;
                    boundary.push(w);
                }
            }
        }
        boundary.sort_unstable();
        Ok(Self { offset, members, boundary })
    }

    pub fn offset(&self) -> Option<Offset> {
        self.offset
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// One selection per distinct lattice displacement: `L³` for cubic shapes,
/// `L²` for Pegasus regions.
pub fn enumerate_subspaces(topology: &LatticeTopology, shape: &SubspaceShape) -> Result<Vec<SubspaceSelection>> {
    let origin = shape.origin_members(topology)?;
    Ok(topology.offsets().into_iter().map(|off| SubspaceSelection::at(topology, &origin, off)).collect())
}
