//! Sparse Ising models and spin configurations.
//!
//! The energy of a configuration is
//! `E(σ) = Σ_(i,j) J_ij σ_i σ_j + Σ_i h_i σ_i`, with σ ∈ {-1, +1}. A spin of
//! `0` marks an unassigned site and contributes nothing; only the greedy
//! coordinate-descent solver builds such partial assignments.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::Value;

use crate::error::{IsingError, Result};

/// One entry of a site's adjacency list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub site: u32,
    pub coupling: f64,
}

/// An Ising model over sites `0..n`.
///
/// Terms are kept in canonical order (fields by site, couplings by
/// `(min, max)` pair) and the adjacency index is built eagerly, so the model
/// is immutable after construction and cheap to share between solver runs.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n: usize,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
    metadata: BTreeMap<String, Value>,
    fields: Vec<f64>,
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
}

/// A coefficient outside the range the annealing hardware can program.
#[derive(Debug, Clone, PartialEq)]
pub enum LintIssue {
    Field { site: usize, value: f64 },
    Coupling { i: usize, j: usize, value: f64 },
}

pub const HARDWARE_FIELD_RANGE: (f64, f64) = (-4.0, 4.0);
pub const HARDWARE_COUPLING_RANGE: (f64, f64) = (-1.0, 1.0);

impl IsingModel {
    pub fn new(
        n: usize,
        linear: Vec<(usize, f64)>,
        quadratic: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let mut linear = linear;
        for &(i, h) in &linear {
            if i >= n {
                return Err(IsingError::SiteOutOfRange { site: i, n });
            }
            if !h.is_finite() {
                return Err(IsingError::NonFinite(format!("field on site {i}")));
            }
        }
        linear.sort_by_key(|&(i, _)| i);
        if let Some(w) = linear.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(IsingError::DuplicateField(w[0].0));
        }

        let mut quadratic: Vec<(usize, usize, f64)> = quadratic
            .into_iter()
            .map(|(i, j, c)| (i.min(j), i.max(j), c))
            .collect();
        for &(i, j, c) in &quadratic {
            if i == j {
                return Err(IsingError::SelfLoop(i));
            }
            if j >= n {
                return Err(IsingError::SiteOutOfRange { site: j, n });
            }
            if !c.is_finite() {
                return Err(IsingError::NonFinite(format!("coupling ({i}, {j})")));
            }
        }
        quadratic.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = quadratic
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(IsingError::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut fields = vec![0.0; n];
        for &(i, h) in &linear {
            fields[i] = h;
        }

        let mut degree = vec![0usize; n];
        for &(i, j, _) in &quadratic {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut adjacency = vec![
            Neighbor {
                site: 0,
                coupling: 0.0
            };
            offsets[n]
        ];
        for &(i, j, c) in &quadratic {
            adjacency[cursor[i]] = Neighbor {
                site: j as u32,
                coupling: c,
            };
            cursor[i] += 1;
            adjacency[cursor[j]] = Neighbor {
                site: i as u32,
                coupling: c,
            };
            cursor[j] += 1;
        }

        Ok(Self {
            n,
            linear,
            quadratic,
            metadata: BTreeMap::new(),
            fields,
            offsets,
            adjacency,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, Vec::new(), Vec::new()).expect("empty model is valid")
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Field terms `(i, h_i)` in ascending site order.
    pub fn linear(&self) -> &[(usize, f64)] {
        &self.linear
    }

    /// Coupling terms `(i, j, J_ij)` with `i < j`, sorted by `(i, j)`.
    pub fn quadratic(&self) -> &[(usize, usize, f64)] {
        &self.quadratic
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut BTreeMap<String, Value> {
        &mut self.metadata
    }

    #[inline]
    pub fn field(&self, site: usize) -> f64 {
        self.fields[site]
    }

    /// Dense field vector, zero where no linear term is present.
    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    #[inline]
    pub fn neighbors(&self, site: usize) -> &[Neighbor] {
        &self.adjacency[self.offsets[site]..self.offsets[site + 1]]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.offsets[site + 1] - self.offsets[site]
    }

    pub fn num_edges(&self) -> usize {
        self.quadratic.len()
    }

    /// `h_i + Σ_j J_ij σ_j`; no validation.
    #[inline]
    pub fn local_field(&self, spins: &[i8], site: usize) -> f64 {
        let mut f = self.fields[site];
        for nb in self.neighbors(site) {
            f += nb.coupling * f64::from(spins[nb.site as usize]);
        }
        f
    }

    /// Energy change of flipping `site`; no validation.
    #[inline]
    pub fn flip_delta(&self, spins: &[i8], site: usize) -> f64 {
        -2.0 * f64::from(spins[site]) * self.local_field(spins, site)
    }

    /// Energy of a raw spin slice; no validation.
    pub fn energy_of(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.n);
        let mut e = 0.0;
        for &(i, j, c) in &self.quadratic {
            e += c * f64::from(spins[i] * spins[j]);
        }
        for &(i, h) in &self.linear {
            e += h * f64::from(spins[i]);
        }
        e
    }

    pub fn energy(&self, config: &SpinConfiguration) -> Result<f64> {
        self.check_len(config)?;
        Ok(self.energy_of(config.as_slice()))
    }

    pub fn delta_energy(&self, config: &SpinConfiguration, site: usize) -> Result<f64> {
        self.check_len(config)?;
        if site >= self.n {
            return Err(IsingError::SiteOutOfRange { site, n: self.n });
        }
        if let Some(open) = config.as_slice().iter().position(|&s| s == 0) {
            return Err(IsingError::Unassigned(open));
        }
        Ok(self.flip_delta(config.as_slice(), site))
    }

    fn check_len(&self, config: &SpinConfiguration) -> Result<()> {
        if config.len() != self.n {
            return Err(IsingError::LengthMismatch {
                expected: self.n,
                got: config.len(),
            });
        }
        Ok(())
    }

    /// Multiplies every coefficient by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        let mut out = Self::new(
            self.n,
            self.linear.iter().map(|&(i, h)| (i, alpha * h)).collect(),
            self.quadratic
                .iter()
                .map(|&(i, j, c)| (i, j, alpha * c))
                .collect(),
        )?;
        out.metadata = self.metadata.clone();
        Ok(out)
    }

    /// Largest possible single-flip `|ΔE|`: `max_i 2(|h_i| + Σ_j |J_ij|)`.
    pub fn max_flip_magnitude(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                2.0 * (self.fields[i].abs()
                    + self.neighbors(i).iter().map(|nb| nb.coupling.abs()).sum::<f64>())
            })
            .fold(0.0, f64::max)
    }

    /// Smallest nonzero coefficient magnitude, if any coefficient is nonzero.
    pub fn min_nonzero_coefficient(&self) -> Option<f64> {
        self.linear
            .iter()
            .map(|t| t.1)
            .chain(self.quadratic.iter().map(|t| t.2))
            .map(f64::abs)
            .filter(|&c| c > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Reports coefficients outside the programmable hardware range
    /// (`-4 <= h <= 4`, `-1 <= J <= 1`). Advisory only.
    pub fn hardware_lint(&self) -> Vec<LintIssue> {
        let (hlo, hhi) = HARDWARE_FIELD_RANGE;
        let (jlo, jhi) = HARDWARE_COUPLING_RANGE;
        let fields = self
            .linear
            .iter()
            .filter(|&&(_, h)| h < hlo || h > hhi)
            .map(|&(site, value)| LintIssue::Field { site, value });
        let couplings = self
            .quadratic
            .iter()
            .filter(|&&(_, _, c)| c < jlo || c > jhi)
            .map(|&(i, j, value)| LintIssue::Coupling { i, j, value });
        fields.chain(couplings).collect()
    }
}

/// Spin assignment over {-1, 0, +1}; `0` means unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some((site, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(-1..=1).contains(&v))
        {
            return Err(IsingError::InvalidSpin { site, value });
        }
        Ok(Self(values))
    }

    pub fn unassigned(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn uniform(n: usize, spin: i8) -> Self {
        assert!(spin == 1 || spin == -1);
        Self(vec![spin; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
    }

    /// Site `i` is `+1` when bit `i` of `bits` is set, `-1` otherwise.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= 64);
        Self((0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(|&s| s != 0)
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [i8] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn flip(&mut self, site: usize) {
        self.0[site] = -self.0[site];
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }
}

impl std::ops::Index<usize> for SpinConfiguration {
    type Output = i8;

    fn index(&self, site: usize) -> &i8 {
        &self.0[site]
    }
}
