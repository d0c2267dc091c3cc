//! Ising ↔ QUBO conversion under `x_i = (σ_i + 1) / 2`.

use crate::error::{IsingError, Result};
use crate::model::IsingModel;

/// `minimize Σ c_ij x_i x_j + Σ c_i x_i + c` over binary `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n: usize,
    quad: Vec<(usize, usize, f64)>,
    lin: Vec<(usize, f64)>,
    offset: f64,
}

impl QuboModel {
    pub fn new(
        n: usize,
        quad: Vec<(usize, usize, f64)>,
        lin: Vec<(usize, f64)>,
        offset: f64,
    ) -> Result<Self> {
        // Reuse the Ising index checks; the term lists come back canonicalised.
        let shape = IsingModel::new(n, lin, quad)?;
        if !offset.is_finite() {
            return Err(IsingError::NonFinite("QUBO offset".into()));
        }
        Ok(Self {
            n,
            quad: shape.quadratic().to_vec(),
            lin: shape.linear().to_vec(),
            offset,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quad(&self) -> &[(usize, usize, f64)] {
        &self.quad
    }

    pub fn lin(&self) -> &[(usize, f64)] {
        &self.lin
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Objective value at a binary point; entries of `x` must be 0 or 1.
    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n {
            return Err(IsingError::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut e = self.offset;
        for &(i, j, c) in &self.quad {
            e += c * f64::from(x[i] * x[j]);
        }
        for &(i, c) in &self.lin {
            e += c * f64::from(x[i]);
        }
        Ok(e)
    }
}

/// `c_ij = 4 J_ij`, `c_i = 2 h_i - 2 Σ_j J_ij`, `c = Σ J_ij - Σ h_i`.
pub fn to_qubo(model: &IsingModel) -> QuboModel {
    let n = model.n();
    let mut lin = vec![0.0; n];
    let mut offset = 0.0;
    for &(i, h) in model.linear() {
        lin[i] += 2.0 * h;
        offset -= h;
    }
    for &(i, j, c) in model.quadratic() {
        lin[i] -= 2.0 * c;
        lin[j] -= 2.0 * c;
        offset += c;
    }
    let quad = model
        .quadratic()
        .iter()
        .map(|&(i, j, c)| (i, j, 4.0 * c))
        .collect();
    let lin = touched_sites(model)
        .into_iter()
        .map(|i| (i, lin[i]))
        .collect();
    QuboModel {
        n,
        quad,
        lin,
        offset,
    }
}

/// Inverse of [`to_qubo`]. An Ising model has no constant term, so any part
/// of the QUBO offset not implied by the coefficients is dropped; use
/// [`from_qubo_with_residual`] to keep it.
pub fn from_qubo(model: &QuboModel) -> IsingModel {
    from_qubo_with_residual(model).0
}

/// Returns the Ising model and the residual constant `r` such that
/// `qubo(x) = ising(σ) + r` for every binary `x`.
pub fn from_qubo_with_residual(model: &QuboModel) -> (IsingModel, f64) {
    let n = model.n;
    let mut fields = vec![0.0; n];
    let mut touched = vec![false; n];
    for &(i, c) in &model.lin {
        fields[i] += 0.5 * c;
        touched[i] = true;
    }
    for &(i, j, c) in &model.quad {
        fields[i] += 0.25 * c;
        fields[j] += 0.25 * c;
        touched[i] = true;
        touched[j] = true;
    }
    let quadratic: Vec<_> = model
        .quad
        .iter()
        .map(|&(i, j, c)| (i, j, 0.25 * c))
        .collect();
    let linear = (0..n)
        .filter(|&i| touched[i])
        .map(|i| (i, fields[i]))
        .collect();
    let ising = IsingModel::new(n, linear, quadratic).expect("QUBO indices already validated");
    let implied = ising.quadratic().iter().map(|t| t.2).sum::<f64>()
        - ising.linear().iter().map(|t| t.1).sum::<f64>();
    (ising, model.offset - implied)
}

fn touched_sites(model: &IsingModel) -> Vec<usize> {
    let mut touched = vec![false; model.n()];
    for &(i, _) in model.linear() {
        touched[i] = true;
    }
    for &(i, j, _) in model.quadratic() {
        touched[i] = true;
        touched[j] = true;
    }
    (0..model.n()).filter(|&i| touched[i]).collect()
}

/// `σ_i = 2 x_i - 1`.
pub fn spins_from_binary(x: &[u8]) -> Vec<i8> {
    x.iter().map(|&b| 2 * b as i8 - 1).collect()
}

/// `x_i = (σ_i + 1) / 2`; sites must be assigned.
pub fn binary_from_spins(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| ((s + 1) / 2) as u8).collect()
}
