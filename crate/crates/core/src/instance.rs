//! Reproducible CBFM / CBFM-P instance generation.
//!
//! Every coefficient is drawn from a counter-based stream: the key is
//! `SHA-256("isingbench-instance-v1" | family | m | seed)` used as a
//! ChaCha20 key, and draw `k` is the first 64-bit word of keystream block
//! position `k` (word position `2k`), mapped to `[0, 1)` from its top 53
//! bits. Edge number `k` (edges in ascending `(min, max)` order) uses counter
//! `k`; the field of site `i` uses counter `E + i`. A draw selects the first
//! category whose running probability sum exceeds it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::model::IsingModel;
use crate::pegasus::pegasus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "cbfm")]
    Cbfm,
    #[serde(rename = "cbfm-p")]
    CbfmP,
}

impl Family {
    /// `(value, probability)` pairs for couplings.
    pub fn coupling_table(self) -> &'static [(f64, f64)] {
        match self {
            Family::Cbfm => &[(-1.0, 0.625), (0.2, 0.375)],
            Family::CbfmP => &[(0.0, 0.35), (-1.0, 0.10), (1.0, 0.55)],
        }
    }

    /// `(value, probability)` pairs for fields.
    pub fn field_table(self) -> &'static [(f64, f64)] {
        match self {
            Family::Cbfm => &[(0.0, 0.97), (-1.0, 0.02), (1.0, 0.01)],
            Family::CbfmP => &[(0.0, 0.15), (-1.0, 0.85), (1.0, 0.0)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Cbfm => "cbfm",
            Family::CbfmP => "cbfm-p",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cbfm" => Ok(Family::Cbfm),
            "cbfm-p" | "cbfmp" => Ok(Family::CbfmP),
            other => Err(format!("unknown instance family '{other}' (expected cbfm or cbfm-p)")),
        }
    }
}

fn pick(table: &[(f64, f64)], u: f64) -> f64 {
    let mut acc = 0.0;
    for &(value, p) in table {
        acc += p;
        if u < acc {
            return value;
        }
    }
    // u can exceed a float cumulative sum that falls just short of 1.
    table
        .iter()
        .rev()
        .find(|&&(_, p)| p > 0.0)
        .map(|&(v, _)| v)
        .unwrap()
}

/// Counter-addressable uniform stream.
#[derive(Clone)]
pub struct InstanceStream {
    rng: ChaCha20Rng,
}

impl InstanceStream {
    pub fn new(family: Family, m: usize, seed: u64) -> Self {
        let material = format!("isingbench-instance-v1|{}|{}|{}", family.name(), m, seed);
        Self::from_key_material(material.as_bytes())
    }

    pub fn from_key_material(material: &[u8]) -> Self {
        let key: [u8; 32] = Sha256::digest(material).into();
        Self {
            rng: ChaCha20Rng::from_seed(key),
        }
    }

    /// Uniform draw number `counter` in `[0, 1)`.
    pub fn uniform(&mut self, counter: u64) -> f64 {
        self.rng.set_word_pos(u128::from(counter) * 2);
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Removed hardware elements, in Pegasus node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    #[serde(default)]
    pub dead_nodes: BTreeSet<usize>,
    #[serde(default)]
    pub dead_edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub m: usize,
    pub seed: u64,
    #[serde(default)]
    pub mask: Option<Mask>,
}

/// Samples coefficients for an arbitrary graph. `edges` must be `(i, j)`
/// pairs with `i < j`; they are consumed in the order given.
pub fn sample_on_graph(
    family: Family,
    n: usize,
    edges: &[(usize, usize)],
    stream: &mut InstanceStream,
) -> Result<IsingModel> {
    let quadratic = edges
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| (i, j, pick(family.coupling_table(), stream.uniform(k as u64))))
        .collect();
    let base = edges.len() as u64;
    let linear = (0..n)
        .map(|i| (i, pick(family.field_table(), stream.uniform(base + i as u64))))
        .collect();
    IsingModel::new(n, linear, quadratic)
}

/// Small instance on an Erdős–Rényi graph: each pair is an edge with
/// probability `edge_prob`. Meant for checks against the exhaustive oracle.
pub fn random_graph_instance(family: Family, n: usize, edge_prob: f64, seed: u64) -> Result<IsingModel> {
    let material = format!("isingbench-random-graph-v1|{}|{n}|{edge_prob}|{seed}", family.name());
    let mut stream = InstanceStream::from_key_material(material.as_bytes());
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    // Edge draws use counters above the coefficient range.
    let offset = (n * n + n) as u64;
    let edges: Vec<(usize, usize)> = pairs
        .enumerate()
        .filter(|&(k, _)| stream.uniform(offset + k as u64) < edge_prob)
        .map(|(_, e)| e)
        .collect();
    Ok(sample_on_graph(family, n, &edges, &mut stream)?
        .with_metadata("family", family.name())
        .with_metadata("seed", seed)
        .with_metadata("topology", "random"))
}

/// Generates the instance described by `spec` over a (masked) Pegasus graph.
/// Sites are the surviving Pegasus nodes in ascending id order.
pub fn generate(spec: &InstanceSpec) -> Result<IsingModel> {
    let mut topo = pegasus(spec.m)?;
    if let Some(mask) = &spec.mask {
        topo = topo.apply_mask(&mask.dead_nodes, &mask.dead_edges)?;
    }
    let edges = topo.compact_edges();
    let mut stream = InstanceStream::new(spec.family, spec.m, spec.seed);
    let model = sample_on_graph(spec.family, topo.num_nodes(), &edges, &mut stream)?;
    let (dead_nodes, dead_edges) = spec
        .mask
        .as_ref()
        .map_or((0, 0), |m| (m.dead_nodes.len(), m.dead_edges.len()));
    Ok(model
        .with_metadata("family", spec.family.name())
        .with_metadata("size", spec.m)
        .with_metadata("seed", spec.seed)
        .with_metadata("topology", "pegasus")
        .with_metadata("dead_nodes", dead_nodes)
        .with_metadata("dead_edges", dead_edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frequency(values: impl Iterator<Item = f64>, target: f64) -> (usize, usize) {
        let mut hits = 0;
        let mut total = 0;
        for v in values {
            total += 1;
            hits += usize::from(v == target);
        }
        (hits, total)
    }

    fn within_sigmas(hits: usize, total: usize, p: f64, k: f64) -> bool {
        let mean = total as f64 * p;
        let sd = (total as f64 * p * (1.0 - p)).sqrt();
        (hits as f64 - mean).abs() <= k * sd.max(1e-12)
    }

    #[test]
    fn tables_sum_to_one() {
        for f in [Family::Cbfm, Family::CbfmP] {
            let j: f64 = f.coupling_table().iter().map(|t| t.1).sum();
            let h: f64 = f.field_table().iter().map(|t| t.1).sum();
            assert!((j - 1.0).abs() < 1e-15 && (h - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = InstanceSpec {
            family: Family::CbfmP,
            m: 4,
            seed: 3,
            mask: None,
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&InstanceSpec { seed: 4, ..spec.clone() }).unwrap();
        assert_ne!(other.quadratic(), generate(&spec).unwrap().quadratic());
    }

    #[test]
    fn cbfm_p_field_fraction() {
        let model = generate(&InstanceSpec {
            family: Family::CbfmP,
            m: 16,
            seed: 1,
            mask: None,
        })
        .unwrap();
        let (hits, total) = frequency(model.linear().iter().map(|t| t.1), -1.0);
        assert_eq!(total, 5640);
        assert!(within_sigmas(hits, total, 0.85, 3.0));
    }

    #[test]
    fn cbfm_has_no_zero_couplings() {
        for seed in 1..=3 {
            let model = generate(&InstanceSpec {
                family: Family::Cbfm,
                m: 8,
                seed,
                mask: None,
            })
            .unwrap();
            assert!(model.quadratic().iter().all(|t| t.2 == -1.0 || t.2 == 0.2));
            assert!(model
                .linear()
                .iter()
                .all(|t| [0.0, -1.0, 1.0].contains(&t.1)));
        }
    }

    #[test]
    fn fully_masked_graph_is_empty() {
        let topo = pegasus(2).unwrap();
        let spec = InstanceSpec {
            family: Family::CbfmP,
            m: 2,
            seed: 9,
            mask: Some(Mask {
                dead_nodes: topo.nodes().clone(),
                dead_edges: BTreeSet::new(),
            }),
        };
        let model = generate(&spec).unwrap();
        assert_eq!(model.n(), 0);
        assert!(model.linear().is_empty() && model.quadratic().is_empty());
    }

    #[test]
    fn uniform_draws_are_addressable() {
        let mut a = InstanceStream::new(Family::Cbfm, 2, 1);
        let mut b = InstanceStream::new(Family::Cbfm, 2, 1);
        let forward: Vec<f64> = (0..10).map(|k| a.uniform(k)).collect();
        let backward: Vec<f64> = (0..10).rev().map(|k| b.uniform(k)).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        assert!(forward.iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn family_parsing() {
        assert_eq!("CBFM-P".parse::<Family>().unwrap(), Family::CbfmP);
        assert!("chimera".parse::<Family>().is_err());
    }

    #[test]
    fn random_graph_instances_are_reproducible() {
        let a = random_graph_instance(Family::CbfmP, 16, 0.3, 5).unwrap();
        let b = random_graph_instance(Family::CbfmP, 16, 0.3, 5).unwrap();
        assert_eq!(a.quadratic(), b.quadratic());
        assert_eq!(a.linear(), b.linear());
        let c = random_graph_instance(Family::CbfmP, 16, 0.3, 6).unwrap();
        assert_ne!(a.quadratic(), c.quadratic());
        let edges: usize = (0..200)
            .map(|s| random_graph_instance(Family::Cbfm, 16, 0.3, s).unwrap().num_edges())
            .sum();
        let mean = edges as f64 / 200.0;
        assert!((mean - 36.0).abs() < 2.0, "{mean}");
    }
}
