//! Pegasus adjacency rules shared by the toric lattice and the hardware graph.
//!
//! A qubit is addressed as `(u, w, k, z)`: `u` is the orientation (0 vertical,
//! 1 horizontal), `w` the perpendicular offset, `k` the track within a tile
//! and `z` the position along the qubit's length. Vertical qubits sit at
//! column `w` and row `z`; horizontal qubits at row `w` and column `z`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Track offsets of the standard Pegasus geometry (vertical, horizontal).
pub const VERTICAL_OFFSETS: [u32; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
pub const HORIZONTAL_OFFSETS: [u32; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

/// Qubits per cell: 12 tracks in each orientation.
pub const CELL_SIZE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PegasusCoord {
    pub u: u32,
    pub w: u32,
    pub k: u32,
    pub z: u32,
}

impl PegasusCoord {
    pub const fn new(u: u32, w: u32, k: u32, z: u32) -> Self {
        Self { u, w, k, z }
    }
}

impl fmt::Display for PegasusCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.u, self.w, self.k, self.z)
    }
}

impl FromStr for PegasusCoord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let parts: Vec<u32> = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad pegasus coordinate '{s}': {e}")))?;
        match parts[..] {
            [u, w, k, z] => Ok(Self { u, w, k, z }),
            _ => Err(Error::InvalidArgument(format!("pegasus coordinate needs 4 components: '{s}'"))),
        }
    }
}

/// Horizontal partner `(w', z')` of vertical qubit `(0, w, k, z)` on track
/// `kk`, before any boundary handling. Every vertical qubit crosses exactly
/// one horizontal qubit per track.
pub fn internal_partner(w: i64, k: u32, z: i64, kk: u32) -> (i64, i64) {
    let dw = i64::from(kk < VERTICAL_OFFSETS[k as usize]);
    let dz = i64::from(k < HORIZONTAL_OFFSETS[kk as usize]);
    (z + dw, w - dz)
}

/// Cell `(x, y)` of a qubit in the nice-cell tiling. Each cell holds three
/// complete K4,4 tiles:
///
/// * tile 0: vertical `(0, x, 4..8, y)`, horizontal `(1, y+1, 4..8, x)`
/// * tile 1: vertical `(0, x, 8..12, y)`, horizontal `(1, y+1, 0..4, x)`
/// * tile 2: vertical `(0, x+1, 0..4, y)`, horizontal `(1, y, 8..12, x)`
pub fn nice_cell(c: PegasusCoord) -> (i64, i64) {
    let (w, z) = (i64::from(c.w), i64::from(c.z));
    if c.u == 0 {
        (w - i64::from(c.k < 4), z)
    } else {
        (z, w - i64::from(c.k < 8))
    }
}

/// Qubit of nice cell `(x, y)`, tile `t` (0..3), orientation `u`, index `j`
/// (0..4).
pub fn nice_qubit(x: u32, y: u32, t: u32, u: u32, j: u32) -> PegasusCoord {
    match (t, u) {
        (0, 0) => PegasusCoord::new(0, x, 4 + j, y),
        (0, _) => PegasusCoord::new(1, y + 1, 4 + j, x),
        (1, 0) => PegasusCoord::new(0, x, 8 + j, y),
        (1, _) => PegasusCoord::new(1, y + 1, j, x),
        (_, 0) => PegasusCoord::new(0, x + 1, j, y),
        (_, _) => PegasusCoord::new(1, y, 8 + j, x),
    }
}

/// Nodes and edges of the standard Pegasus graph P[m]. With `fabric_only`
/// the qubits that have no internal couplers are dropped.
pub fn standard_graph(m: usize, fabric_only: bool) -> (Vec<PegasusCoord>, Vec<(PegasusCoord, PegasusCoord)>) {
    assert!(m >= 2, "P[m] needs m >= 2");
    let m = m as u32;
    let m1 = m - 1;
    let keep = |c: &PegasusCoord| !fabric_only || !((c.w == 0 && c.k < 2) || (c.w == m1 && c.k >= 10));
    let mut nodes = Vec::new();
    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                for z in 0..m1 {
                    let c = PegasusCoord::new(u, w, k, z);
                    if keep(&c) {
                        nodes.push(c);
                    }
                }
            }
        }
    }
    let mut edges = Vec::new();
    let mut push = |a: PegasusCoord, b: PegasusCoord| {
        if keep(&a) && keep(&b) {
            edges.push((a, b));
        }
    };
    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                for z in 0..m1.saturating_sub(1) {
                    push(PegasusCoord::new(u, w, k, z), PegasusCoord::new(u, w, k, z + 1));
                }
            }
        }
    }
    for u in 0..2 {
        for w in 0..m {
            for k in (0..12).step_by(2) {
                for z in 0..m1 {
                    push(PegasusCoord::new(u, w, k, z), PegasusCoord::new(u, w, k + 1, z));
                }
            }
        }
    }
    for w in 0..m {
        for k in 0..12 {
            for z in 0..m1 {
                for kk in 0..12 {
                    let (pw, pz) = internal_partner(i64::from(w), k, i64::from(z), kk);
                    if (0..i64::from(m)).contains(&pw) && (0..i64::from(m1)).contains(&pz) {
                        push(PegasusCoord::new(0, w, k, z), PegasusCoord::new(1, pw as u32, kk, pz as u32));
                    }
                }
            }
        }
    }
    (nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn advantage_scale_counts() {
        // Advantage-class P[16] fabric: 5640 qubits, 40484 couplers.
        let (nodes, edges) = standard_graph(16, true);
        assert_eq!(nodes.len(), 5640);
        assert_eq!(edges.len(), 40484);
    }

    #[test]
    fn nice_tiles_are_complete_bipartite() {
        let (_, edges) = standard_graph(4, true);
        let set: HashSet<_> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        for x in 0..3 {
            for y in 0..3 {
                for t in 0..3 {
                    for i in 0..4 {
                        for j in 0..4 {
                            let v = nice_qubit(x, y, t, 0, i);
                            let h = nice_qubit(x, y, t, 1, j);
                            assert!(set.contains(&(v, h)), "tile {t} at ({x},{y}) misses {v}-{h}");
                            assert_eq!(nice_cell(v), (x as i64, y as i64));
                            assert_eq!(nice_cell(h), (x as i64, y as i64));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coordinate_text_round_trip() {
        let c = PegasusCoord::new(1, 3, 11, 0);
        assert_eq!(c.to_string().parse::<PegasusCoord>().unwrap(), c);
        assert!("1,2,3".parse::<PegasusCoord>().is_err());
    }
}
