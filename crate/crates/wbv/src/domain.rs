//! Box domains, regular grids, and cell-center sampled grid functions.
//!
//! Functions are sampled at cell centers `lower + (i + 1/2) h`, which keeps
//! total-variation sums and perimeter face sums aligned with cell geometry.
//! Weight samples may take the value `f64::INFINITY`; ordinary grid functions
//! carry only finite values.

use crate::error::{Result, WbvError};
use serde::{Deserialize, Serialize};

/// An open axis-aligned box in dimension 1, 2, or 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = lower.len();
        if n == 0 || n > 3 || upper.len() != n {
            return Err(WbvError::InvalidArgument(format!(
                "dimension must be 1, 2, or 3 (got lower len {}, upper len {})",
                lower.len(),
                upper.len()
            )));
        }
        for i in 0..n {
            if !(upper[i] > lower[i]) || !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(WbvError::InvalidArgument(format!(
                    "upper corner must strictly exceed lower corner per axis (axis {i}: {} vs {})",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// 1-D interval (a, b).
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    /// 2-D rectangle.
    pub fn rect(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        Self::new(lower.to_vec(), upper.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.extent(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.extent(i)).product()
    }

    /// Distance from `x` to the boundary of the box (0 outside).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.dim() {
            d = d.min(x[i] - self.lower[i]).min(self.upper[i] - x[i]);
        }
        d.max(0.0)
    }

    /// Half the smallest extent: the largest value `boundary_distance` attains.
    pub fn inradius(&self) -> f64 {
        (0..self.dim()).map(|i| self.extent(i) / 2.0).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|i| x[i] > self.lower[i] && x[i] < self.upper[i])
    }
}

/// A regular lattice of cells over a [`BoxDomain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    domain: BoxDomain,
    resolution: Vec<usize>,
    spacing: Vec<f64>,
}

/// Cell-centered grid over a box. Resolution must be at least 2 per axis.
pub fn make_grid(domain: &BoxDomain, resolution: &[usize]) -> Result<Grid> {
    Grid::new(domain.clone(), resolution.to_vec())
}

impl Grid {
    pub fn new(domain: BoxDomain, resolution: Vec<usize>) -> Result<Self> {
        if resolution.len() != domain.dim() {
            return Err(WbvError::DimensionMismatch {
                expected: domain.dim(),
                got: resolution.len(),
            });
        }
        if resolution.iter().any(|&r| r < 2) {
            return Err(WbvError::InvalidArgument(format!(
                "resolution must be at least 2 per axis (got {resolution:?})"
            )));
        }
        let spacing = (0..domain.dim())
            .map(|i| domain.extent(i) / resolution[i] as f64)
            .collect();
        Ok(Self { domain, resolution, spacing })
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Product of spacings: the n-dimensional cell volume.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn num_cells(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Flatten a multi-index (row-major, axis 0 slowest).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (i, &k) in idx.iter().enumerate() {
            flat = flat * self.resolution[i] + k;
        }
        flat
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let n = self.dim();
        let mut idx = vec![0; n];
        for i in (0..n).rev() {
            idx[i] = flat % self.resolution[i];
            flat /= self.resolution[i];
        }
        idx
    }

    pub fn center_of(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(i, &k)| self.domain.lower()[i] + (k as f64 + 0.5) * self.spacing[i])
            .collect()
    }

    pub fn center_of_flat(&self, flat: usize) -> Vec<f64> {
        self.center_of(&self.multi_index(flat))
    }

    /// Iterate over all cell centers in flat order.
    pub fn centers(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.num_cells()).map(move |i| self.center_of_flat(i))
    }
}

/// One scalar per cell center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(WbvError::InvalidArgument(format!(
                "value count {} does not match cell count {}",
                values.len(),
                grid.num_cells()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample an evaluator at every cell center. Infinite values are
    /// preserved (weights may be +inf at isolated points); NaN is a
    /// sampling error.
    pub fn sample<F: Fn(&[f64]) -> f64>(grid: &Grid, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.num_cells());
        for (i, c) in grid.centers().enumerate() {
            let v = f(&c);
            if v.is_nan() {
                return Err(WbvError::Sampling {
                    cell: i,
                    reason: format!("evaluator returned NaN at {c:?}"),
                });
            }
            values.push(v);
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.num_cells()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Discrete weighted L1 norm: sum |f| w h^n over cells.
    pub fn l1_weighted(&self, weight_samples: &GridFunction) -> f64 {
        let hv = self.grid.cell_volume();
        let terms: Vec<f64> = self
            .values
            .iter()
            .zip(weight_samples.values())
            .map(|(&f, &w)| crate::util::weighted_term(w, f.abs()) * hv)
            .collect();
        crate::util::pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_centers_1d() {
        let d = BoxDomain::interval(0.0, 1.0).unwrap();
        let g = make_grid(&d, &[4]).unwrap();
        assert_eq!(g.spacing(), &[0.25]);
        let centers: Vec<f64> = g.centers().map(|c| c[0]).collect();
        assert_eq!(centers, vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn grid_2d_counts() {
        let d = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let g = make_grid(&d, &[8, 8]).unwrap();
        assert_eq!(g.num_cells(), 64);
        assert_eq!(g.spacing(), &[0.5, 0.5]);
    }

    #[test]
    fn zero_resolution_rejected() {
        let d = BoxDomain::interval(0.0, 1.0).unwrap();
        assert!(make_grid(&d, &[0]).is_err());
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(BoxDomain::interval(1.0, 1.0).is_err());
        assert!(BoxDomain::new(vec![0.0; 4], vec![1.0; 4]).is_err());
    }

    #[test]
    fn sample_is_deterministic() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let g = make_grid(&d, &[64]).unwrap();
        let a = GridFunction::sample(&g, |x| (x[0] * 3.7).sin()).unwrap();
        let b = GridFunction::sample(&g, |x| (x[0] * 3.7).sin()).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn refinement_midpoint_property() {
        // Coarse centers are midpoints of pairs of fine centers.
        let d = BoxDomain::interval(0.0, 1.0).unwrap();
        let coarse = make_grid(&d, &[8]).unwrap();
        let fine = make_grid(&d, &[16]).unwrap();
        for i in 0..8 {
            let c = coarse.center_of(&[i])[0];
            let f0 = fine.center_of(&[2 * i])[0];
            let f1 = fine.center_of(&[2 * i + 1])[0];
            assert!((c - 0.5 * (f0 + f1)).abs() < 1e-15);
        }
    }
}
