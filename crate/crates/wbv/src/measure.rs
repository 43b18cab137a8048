//! Locally finite Borel measures: atoms plus an optional Lebesgue component,
//! and the dyadic-atom family used to exhibit measures with everywhere-infinite
//! maximal function.

use crate::error::{Result, WbvError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    dim: usize,
    atoms: Vec<(Vec<f64>, f64)>,
    /// Scale of an absolutely continuous Lebesgue part (constant density).
    lebesgue: f64,
    /// 1-D only: atoms of mass 2^k at each integer k >= 1.
    dyadic_atoms: bool,
}

impl Measure {
    pub fn dirac(location: Vec<f64>) -> Self {
        let dim = location.len();
        Self { dim, atoms: vec![(location, 1.0)], lebesgue: 0.0, dyadic_atoms: false }
    }

    pub fn lebesgue(dim: usize) -> Self {
        Self { dim, atoms: vec![], lebesgue: 1.0, dyadic_atoms: false }
    }

    /// Sum over k >= 1 of 2^k dirac_k on the line.
    pub fn dyadic_atoms_1d() -> Self {
        Self { dim: 1, atoms: vec![], lebesgue: 0.0, dyadic_atoms: true }
    }

    pub fn with_atoms(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (loc, m) in &atoms {
            if loc.len() != dim {
                return Err(WbvError::DimensionMismatch { expected: dim, got: loc.len() });
            }
            if !(*m > 0.0) {
                return Err(WbvError::InvalidArgument(format!("atom mass must be positive, got {m}")));
            }
        }
        Ok(Self { dim, atoms, lebesgue: 0.0, dyadic_atoms: false })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mass of the open box (lo, hi).
    pub fn mass_box(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let mut mass = 0.0;
        for (loc, m) in &self.atoms {
            if (0..self.dim).all(|i| loc[i] > lo[i] && loc[i] < hi[i]) {
                mass += m;
            }
        }
        if self.lebesgue > 0.0 {
            let vol: f64 = (0..self.dim).map(|i| (hi[i] - lo[i]).max(0.0)).product();
            mass += self.lebesgue * vol;
        }
        if self.dyadic_atoms {
            // sum of 2^k over integers k in (lo, hi), k >= 1
            let k_lo = (lo[0].floor() as i64 + 1).max(1);
            let k_hi = if hi[0].is_finite() {
                (hi[0].ceil() as i64 - 1).min(4000)
            } else {
                4000
            };
            if k_hi >= k_lo {
                // geometric sum 2^{k_lo} + ... + 2^{k_hi} = 2^{k_hi+1} - 2^{k_lo}
                mass += ((k_hi + 1) as f64).exp2() - (k_lo as f64).exp2();
            }
        }
        mass
    }

    pub fn mass_interval(&self, a: f64, b: f64) -> f64 {
        self.mass_box(&[a], &[b])
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.lebesgue == 0.0 && !self.dyadic_atoms
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_mass() {
        let mu = Measure::dirac(vec![0.0]);
        assert_eq!(mu.mass_interval(-0.5, 0.5), 1.0);
        assert_eq!(mu.mass_interval(0.1, 0.5), 0.0);
    }

    #[test]
    fn lebesgue_mass() {
        let mu = Measure::lebesgue(1);
        assert!((mu.mass_interval(-1.0, 3.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn dyadic_growth() {
        let mu = Measure::dyadic_atoms_1d();
        // k = 1..4: 2 + 4 + 8 + 16 = 30
        assert_eq!(mu.mass_interval(0.5, 4.5), 30.0);
        // ratio mu(B(0,R)) / |B(0,R)| blows up
        let r = 600.0;
        let ratio = mu.mass_interval(-r, r) / (2.0 * r);
        assert!(ratio > 1e150);
    }

    #[test]
    fn nonpositive_atom_mass_rejected() {
        assert!(Measure::with_atoms(1, vec![(vec![0.0], 0.0)]).is_err());
    }
}
