//! Pegasus hardware graphs.
//!
//! Qubits carry the usual four-field coordinate `(u, w, k, z)`: orientation
//! `u` (0 vertical, 1 horizontal), perpendicular offset `w ∈ 0..m`, track
//! index `k ∈ 0..12` and parallel offset `z ∈ 0..m-1`. Node ids are the
//! linear index `((u·m + w)·12 + k)·(m-1) + z`.
//!
//! Adjacency follows three coordinate rules:
//! * external couplers join `(u, w, k, z)` and `(u, w, k, z+1)`;
//! * odd couplers join `(u, w, 2j, z)` and `(u, w, 2j+1, z)`;
//! * internal couplers join perpendicular qubits according to the standard
//!   vertical / horizontal shift tables.
//!
//! Only the fabric (qubits that carry internal couplers) is generated, which
//! leaves `8(m-1)(3m-1)` nodes of maximum degree 15.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use crate::error::{IsingError, Result};

const VERTICAL_SHIFTS: [usize; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
const HORIZONTAL_SHIFTS: [usize; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PegasusCoord {
    pub u: u8,
    pub w: u16,
    pub k: u8,
    pub z: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PegasusTopology {
    m: usize,
    nodes: BTreeSet<usize>,
    edges: BTreeSet<(usize, usize)>,
}

impl PegasusTopology {
    pub fn size(&self) -> usize {
        self.m
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> &BTreeSet<usize> {
        &self.nodes
    }

    /// Edges as `(min, max)` id pairs in ascending order.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn coordinate(&self, id: usize) -> Option<PegasusCoord> {
        self.nodes.contains(&id).then(|| linear_to_coord(self.m, id))
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut deg: BTreeMap<usize, usize> = self.nodes.iter().map(|&v| (v, 0)).collect();
        for &(a, b) in &self.edges {
            *deg.get_mut(&a).unwrap() += 1;
            *deg.get_mut(&b).unwrap() += 1;
        }
        deg
    }

    /// Position of each node id in ascending order, i.e. the compact site
    /// index used by generated instances.
    pub fn site_index(&self) -> BTreeMap<usize, usize> {
        self.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    }

    /// Edges relabelled to compact site indices, still in ascending order.
    pub fn compact_edges(&self) -> Vec<(usize, usize)> {
        let index = self.site_index();
        self.edges
            .iter()
            .map(|(a, b)| (index[a], index[b]))
            .collect()
    }

    /// Removes the listed nodes (with their incident edges) and edges.
    pub fn apply_mask(
        &self,
        dead_nodes: &BTreeSet<usize>,
        dead_edges: &BTreeSet<(usize, usize)>,
    ) -> Result<Self> {
        if let Some(&v) = dead_nodes.iter().find(|v| !self.nodes.contains(v)) {
            return Err(IsingError::UnknownNode(v));
        }
        let dead_edges: BTreeSet<(usize, usize)> =
            dead_edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        if let Some(&(a, b)) = dead_edges.iter().find(|e| !self.edges.contains(e)) {
            return Err(IsingError::UnknownEdge(a, b));
        }
        let nodes = self.nodes.difference(dead_nodes).copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| {
                !dead_edges.contains(e) && !dead_nodes.contains(&e.0) && !dead_nodes.contains(&e.1)
            })
            .copied()
            .collect();
        Ok(Self {
            m: self.m,
            nodes,
            edges,
        })
    }

    /// Adjacency list as `i,j` lines of compact site indices.
    pub fn write_adjacency_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (a, b) in self.compact_edges() {
            writeln!(out, "{a},{b}")?;
        }
        Ok(())
    }

    pub fn save_adjacency_csv(&self, path: &Path) -> Result<()> {
        let io_err = |source| IsingError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut out = std::io::BufWriter::new(file);
        self.write_adjacency_csv(&mut out).map_err(io_err)?;
        out.flush().map_err(io_err)
    }
}

pub fn fabric_node_count(m: usize) -> usize {
    8 * (m - 1) * (3 * m - 1)
}

pub fn coord_to_linear(m: usize, c: PegasusCoord) -> usize {
    ((c.u as usize * m + c.w as usize) * 12 + c.k as usize) * (m - 1) + c.z as usize
}

pub fn linear_to_coord(m: usize, id: usize) -> PegasusCoord {
    let m1 = m - 1;
    let z = id % m1;
    let rest = id / m1;
    let k = rest % 12;
    let rest = rest / 12;
    let w = rest % m;
    let u = rest / m;
    PegasusCoord {
        u: u as u8,
        w: w as u16,
        k: k as u8,
        z: z as u16,
    }
}

/// Fabric-only Pegasus graph of size parameter `m`.
pub fn pegasus(m: usize) -> Result<PegasusTopology> {
    if m < 2 {
        return Err(IsingError::InvalidSize(m));
    }
    let m1 = m - 1;
    // Track ranges trimmed at the boundary rows so that every kept qubit
    // has internal couplers.
    let start = [
        *HORIZONTAL_SHIFTS.iter().min().unwrap(),
        *VERTICAL_SHIFTS.iter().min().unwrap(),
    ];
    let end = [
        12 - *HORIZONTAL_SHIFTS.iter().max().unwrap(),
        12 - *VERTICAL_SHIFTS.iter().max().unwrap(),
    ];
    let in_fabric = |u: usize, w: usize, k: usize| {
        (w != 0 || k >= start[u]) && (w != m1 || k < 12 - end[u])
    };
    let id = |u: usize, w: usize, k: usize, z: usize| ((u * m + w) * 12 + k) * m1 + z;

    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut add = |a: usize, b: usize| {
        edges.insert((a.min(b), a.max(b)));
    };

    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                if !in_fabric(u, w, k) {
                    continue;
                }
                for z in 0..m1 {
                    nodes.insert(id(u, w, k, z));
                    if z + 1 < m1 {
                        add(id(u, w, k, z), id(u, w, k, z + 1));
                    }
                    if k % 2 == 0 {
                        add(id(u, w, k, z), id(u, w, k + 1, z));
                    }
                }
            }
        }
    }

    // Internal couplers: vertical (0, w, k, z) meets horizontal
    // (1, z + [kk < vshift[k]], kk, w - [k < hshift[kk]]).
    for w in 0..m {
        for kk in 0..12 {
            let k_lo = if w == 0 { HORIZONTAL_SHIFTS[kk] } else { 0 };
            let k_hi = if w < m1 { 12 } else { HORIZONTAL_SHIFTS[kk] };
            for k in k_lo..k_hi {
                for z in 0..m1 {
                    let hw = z + usize::from(kk < VERTICAL_SHIFTS[k]);
                    let hz = w - usize::from(k < HORIZONTAL_SHIFTS[kk]);
                    if in_fabric(0, w, k) && in_fabric(1, hw, kk) {
                        add(id(0, w, k, z), id(1, hw, kk, hz));
                    }
                }
            }
        }
    }

    debug_assert!(edges
        .iter()
        .all(|(a, b)| nodes.contains(a) && nodes.contains(b)));
    Ok(PegasusTopology { m, nodes, edges })
}
