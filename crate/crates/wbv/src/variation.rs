//! Discrete weighted total variation and weighted perimeter, duality lower
//! bounds via feasible test fields, and the lower-semicontinuity probe.
//!
//! The gradient uses forward differences living on the face each cell owns
//! (the face toward larger coordinates); cells on the upper boundary copy the
//! neighboring component so that linear functions have exact variation. The
//! divergence in `dual_lower_bound` is the exact negative adjoint of that
//! gradient, which makes duality a machine-precision inequality instead of an
//! asymptotic one.

use crate::domain::{BoxDomain, Grid, GridFunction};
use crate::error::{Result, WbvError};
use crate::quad;
use crate::shape::ShapeSet;
use crate::util::{pairwise_sum, weighted_term};
use crate::weight::Weight;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariationMethod {
    GradientSum,
    FaceSum,
    BoundaryQuadrature,
    DualBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariationReport {
    pub value: f64,
    pub method: VariationMethod,
    pub resolution: Vec<usize>,
    /// Optional (h, value) pairs from grid refinement.
    pub refinement: Option<Vec<(f64, f64)>>,
}

/// Forward-difference gradient component along `axis` at every cell.
/// The topmost layer copies its lower neighbor.
pub fn forward_gradient(f: &GridFunction, axis: usize) -> Vec<f64> {
    let g = f.grid();
    let n = g.resolution()[axis];
    let h = g.spacing()[axis];
    let mut out = vec![0.0; g.num_cells()];
    for flat in 0..g.num_cells() {
        let mut idx = g.multi_index(flat);
        if idx[axis] + 1 < n {
            idx[axis] += 1;
            out[flat] = (f.values()[g.flat_index(&idx)] - f.values()[flat]) / h;
        }
    }
    for flat in 0..g.num_cells() {
        let mut idx = g.multi_index(flat);
        if idx[axis] + 1 == n {
            idx[axis] -= 1;
            out[flat] = out[g.flat_index(&idx)];
        }
    }
    out
}

/// Euclidean gradient magnitude per cell.
pub fn gradient_magnitude(f: &GridFunction) -> Vec<f64> {
    let dim = f.grid().dim();
    let comps: Vec<Vec<f64>> = (0..dim).map(|a| forward_gradient(f, a)).collect();
    (0..f.grid().num_cells())
        .map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .collect()
}

/// Weighted total variation against precomputed weight samples.
pub fn weighted_tv_samples(f: &GridFunction, w_samples: &GridFunction) -> Result<f64> {
    if w_samples.grid() != f.grid() {
        return Err(WbvError::InvalidArgument(
            "weight samples live on a different grid than f".into(),
        ));
    }
    let mags = gradient_magnitude(f);
    let hv = f.grid().cell_volume();
    let terms: Vec<f64> = mags
        .iter()
        .zip(w_samples.values())
        .map(|(&m, &w)| weighted_term(w, m) * hv)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Sum over cells of w(x) |grad_h f(x)| h^n. A cell with infinite weight
/// contributes +inf only when its gradient is nonzero.
pub fn weighted_tv(f: &GridFunction, w: &Weight) -> Result<VariationReport> {
    let ws = GridFunction::sample(f.grid(), |x| w.eval(x))?;
    Ok(VariationReport {
        value: weighted_tv_samples(f, &ws)?,
        method: VariationMethod::GradientSum,
        resolution: f.grid().resolution().to_vec(),
        refinement: None,
    })
}

/// Weighted TV of `sampler` over a sequence of resolutions, recording the
/// (h, value) refinement history; value is taken from the finest grid.
pub fn weighted_tv_refined<F: Fn(&[f64]) -> f64>(
    sampler: F,
    w: &Weight,
    domain: &BoxDomain,
    resolutions: &[usize],
) -> Result<VariationReport> {
    if resolutions.is_empty() {
        return Err(WbvError::InvalidArgument("no resolutions given".into()));
    }
    let mut history = Vec::new();
    let mut last = (0.0, vec![]);
    for &n in resolutions {
        let grid = Grid::new(domain.clone(), vec![n; domain.dim()])?;
        let f = GridFunction::sample(&grid, &sampler)?;
        let rep = weighted_tv(&f, w)?;
        history.push((grid.spacing()[0], rep.value));
        last = (rep.value, rep.resolution);
    }
    Ok(VariationReport {
        value: last.0,
        method: VariationMethod::GradientSum,
        resolution: last.1,
        refinement: Some(history),
    })
}

/// A vector field with one component per axis, stored per cell on the face
/// that cell owns. Cells in the topmost layer along an axis own no face and
/// must carry zero there, which also encodes compact support.
#[derive(Debug, Clone)]
pub struct TestField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl TestField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(WbvError::DimensionMismatch {
                expected: grid.dim(),
                got: components.len(),
            });
        }
        for (a, comp) in components.iter().enumerate() {
            if comp.len() != grid.num_cells() {
                return Err(WbvError::InvalidArgument(format!(
                    "component {a} has {} entries, expected {}",
                    comp.len(),
                    grid.num_cells()
                )));
            }
            for flat in 0..grid.num_cells() {
                let idx = grid.multi_index(flat);
                if idx[a] + 1 == grid.resolution()[a] && comp[flat] != 0.0 {
                    return Err(WbvError::InvalidArgument(format!(
                        "component {a} must vanish on the top layer (cell {flat})"
                    )));
                }
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zero(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            components: vec![vec![0.0; grid.num_cells()]; grid.dim()],
        }
    }

    /// Evaluate closures at owned-face centers (cell center shifted half a
    /// cell along the component axis).
    pub fn sample<F: Fn(usize, &[f64]) -> f64>(grid: &Grid, f: F) -> Result<Self> {
        let mut components = vec![vec![0.0; grid.num_cells()]; grid.dim()];
        for flat in 0..grid.num_cells() {
            let idx = grid.multi_index(flat);
            let center = grid.center_of(&idx);
            for a in 0..grid.dim() {
                if idx[a] + 1 < grid.resolution()[a] {
                    let mut fc = center.clone();
                    fc[a] += 0.5 * grid.spacing()[a];
                    components[a][flat] = f(a, &fc);
                }
            }
        }
        Self::new(grid.clone(), components)
    }

    /// Uniform random components in [-1, 1], then clipped into feasibility
    /// for `w`.
    pub fn random_feasible<R: Rng>(grid: &Grid, w: &Weight, rng: &mut R) -> Result<Self> {
        let mut field = Self::sample(grid, |_, _| 0.0)?;
        for a in 0..grid.dim() {
            for flat in 0..grid.num_cells() {
                let idx = grid.multi_index(flat);
                if idx[a] + 1 < grid.resolution()[a] {
                    field.components[a][flat] = rng.gen_range(-1.0..1.0);
                }
            }
        }
        Ok(field.clipped(w))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    /// Per-cell Euclidean norm of the owned-face components.
    fn cell_norm(&self, flat: usize) -> f64 {
        self.components
            .iter()
            .map(|c| c[flat] * c[flat])
            .sum::<f64>()
            .sqrt()
    }

    /// max over cells of |phi| / w at the cell center; <= 1 means feasible.
    pub fn feasibility_certificate(&self, w: &Weight) -> Result<f64> {
        let ws = GridFunction::sample(&self.grid, |x| w.eval(x))?;
        let mut cert = 0.0f64;
        for flat in 0..self.grid.num_cells() {
            let norm = self.cell_norm(flat);
            if norm == 0.0 {
                continue;
            }
            let wv = ws.values()[flat];
            let r = if wv.is_infinite() { 0.0 } else { norm / wv };
            if r > cert {
                cert = r;
            }
        }
        Ok(cert)
    }

    /// Scale each cell's components so |phi| <= w there.
    pub fn clipped(&self, w: &Weight) -> Self {
        let ws = GridFunction::sample(&self.grid, |x| w.eval(x))
            .expect("weight sampleable on the field's grid");
        let mut out = self.clone();
        for flat in 0..self.grid.num_cells() {
            let norm = self.cell_norm(flat);
            let wv = ws.values()[flat];
            if norm > 0.0 && wv.is_finite() && norm > wv {
                let s = wv / norm * (1.0 - 1e-12);
                for c in &mut out.components {
                    c[flat] *= s;
                }
            }
        }
        out
    }
}

/// Discrete sum of f * div_h(phi) * h^n, where div_h is the exact negative
/// adjoint of the owned-face forward-difference gradient. Always at most the
/// weighted TV for feasible fields.
pub fn dual_lower_bound(f: &GridFunction, w: &Weight, phi: &TestField) -> Result<f64> {
    if phi.grid() != f.grid() {
        return Err(WbvError::InvalidArgument(
            "test field lives on a different grid than f".into(),
        ));
    }
    let cert = phi.feasibility_certificate(w)?;
    if cert > 1.0 + 1e-9 {
        return Err(WbvError::InfeasibleField { certificate: cert });
    }
    let g = f.grid();
    let hv = g.cell_volume();
    let mut terms = Vec::with_capacity(g.num_cells());
    for flat in 0..g.num_cells() {
        let idx = g.multi_index(flat);
        let mut div = 0.0;
        for a in 0..g.dim() {
            let h = g.spacing()[a];
            let here = phi.components()[a][flat];
            let below = if idx[a] > 0 {
                let mut j = idx.clone();
                j[a] -= 1;
                phi.components()[a][g.flat_index(&j)]
            } else {
                0.0
            };
            div += (here - below) / h;
        }
        terms.push(f.values()[flat] * div * hv);
    }
    Ok(pairwise_sum(&terms))
}

/// Iterated adaptive quadrature of `f` over an axis-aligned rectangle of
/// dimension `dims.len()` (0 = point evaluation).
fn integrate_rect(
    f: &dyn Fn(&[f64]) -> f64,
    fixed: &mut Vec<f64>,
    ranges: &[(usize, f64, f64)],
    splits: &[f64],
) -> Result<f64> {
    match ranges.split_first() {
        None => Ok(f(fixed)),
        Some((&(axis, a, b), rest)) => {
            let cell = std::cell::RefCell::new((fixed.clone(), Ok(0.0)));
            let val = quad::integrate_split(
                |t| {
                    let mut borrow = cell.borrow_mut();
                    borrow.0[axis] = t;
                    let mut point = borrow.0.clone();
                    match integrate_rect(f, &mut point, rest, splits) {
                        Ok(v) => v,
                        Err(e) => {
                            borrow.1 = Err(e);
                            0.0
                        }
                    }
                },
                a,
                b,
                splits,
                1e-8,
            )?;
            cell.into_inner().1?;
            Ok(val)
        }
    }
}

/// Integral of w over one face of a box, clipped to the open domain; faces
/// lying on or outside the domain boundary contribute nothing.
fn box_face_integrals(b: &BoxDomain, w: &Weight, domain: &BoxDomain) -> Result<f64> {
    let dim = b.dim();
    let splits = w.singular_points_1d();
    let mut total = 0.0;
    for axis in 0..dim {
        for &coord in &[b.lower()[axis], b.upper()[axis]] {
            if coord <= domain.lower()[axis] || coord >= domain.upper()[axis] {
                continue;
            }
            // Clip the tangential extents to the domain.
            let mut ranges = Vec::new();
            let mut degenerate = false;
            for t in 0..dim {
                if t == axis {
                    continue;
                }
                let lo = b.lower()[t].max(domain.lower()[t]);
                let hi = b.upper()[t].min(domain.upper()[t]);
                if hi <= lo {
                    degenerate = true;
                    break;
                }
                ranges.push((t, lo, hi));
            }
            if degenerate {
                continue;
            }
            let mut point = vec![0.0; dim];
            point[axis] = coord;
            let eval = |x: &[f64]| w.eval(x);
            total += integrate_rect(&eval, &mut point, &ranges, &splits)?;
        }
    }
    Ok(total)
}

/// Weighted perimeter of a set relative to the open box `domain`: boundary
/// pieces on or outside the domain boundary are excluded.
pub fn weighted_perimeter(
    shape: &ShapeSet,
    w: &Weight,
    domain: &BoxDomain,
) -> Result<VariationReport> {
    let (value, method) = match shape {
        ShapeSet::Empty { .. } => (0.0, VariationMethod::FaceSum),
        ShapeSet::Intervals { intervals } => {
            let mut total = 0.0;
            for &(a, b) in intervals {
                for e in [a, b] {
                    if e > domain.lower()[0] && e < domain.upper()[0] {
                        total += w.eval1(e);
                    }
                }
            }
            (total, VariationMethod::FaceSum)
        }
        ShapeSet::Boxes { boxes } => {
            let mut total = 0.0;
            for b in boxes {
                total += box_face_integrals(b, w, domain)?;
            }
            (total, VariationMethod::FaceSum)
        }
        ShapeSet::Circle { center, radius } => {
            let inside = domain.contains(&[center[0] - radius, center[1] - radius])
                && domain.contains(&[center[0] + radius, center[1] + radius]);
            if !inside {
                return Err(WbvError::InvalidArgument(
                    "circle must lie strictly inside the domain".into(),
                ));
            }
            let (cx, cy, r) = (center[0], center[1], *radius);
            let v = quad::integrate(
                |t| w.eval(&[cx + r * t.cos(), cy + r * t.sin()]) * r,
                0.0,
                std::f64::consts::TAU,
                1e-8,
            )?;
            (v, VariationMethod::BoundaryQuadrature)
        }
        ShapeSet::Implicit { dim, phi } => {
            if *dim != 2 {
                return Err(WbvError::InvalidArgument(
                    "implicit perimeter is supported in 2-D only".into(),
                ));
            }
            (implicit_perimeter_2d(phi.as_ref(), w, domain, 512), VariationMethod::BoundaryQuadrature)
        }
    };
    Ok(VariationReport {
        value,
        method,
        resolution: vec![],
        refinement: None,
    })
}

/// First-order marching-squares boundary length weighted by w at segment
/// midpoints.
fn implicit_perimeter_2d(
    phi: &dyn Fn(&[f64]) -> f64,
    w: &Weight,
    domain: &BoxDomain,
    n: usize,
) -> f64 {
    let hx = domain.extent(0) / n as f64;
    let hy = domain.extent(1) / n as f64;
    let corner = |i: usize, j: usize| {
        [
            domain.lower()[0] + i as f64 * hx,
            domain.lower()[1] + j as f64 * hy,
        ]
    };
    let interp = |p: [f64; 2], q: [f64; 2], vp: f64, vq: f64| {
        let t = vp / (vp - vq);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let c = [corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)];
            let v: Vec<f64> = c.iter().map(|p| phi(p)).collect();
            let mut crossings = Vec::new();
            for e in 0..4 {
                let (p, q) = (c[e], c[(e + 1) % 4]);
                let (vp, vq) = (v[e], v[(e + 1) % 4]);
                if (vp < 0.0) != (vq < 0.0) {
                    crossings.push(interp(p, q, vp, vq));
                }
            }
            if crossings.len() == 2 {
                let dx = crossings[1][0] - crossings[0][0];
                let dy = crossings[1][1] - crossings[0][1];
                let len = (dx * dx + dy * dy).sqrt();
                let mid = [
                    0.5 * (crossings[0][0] + crossings[1][0]),
                    0.5 * (crossings[0][1] + crossings[1][1]),
                ];
                if domain.contains(&mid) {
                    total += w.eval(&mid) * len;
                }
            }
        }
    }
    total
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LscReport {
    pub l1_gaps: Vec<f64>,
    pub tv_sequence: Vec<f64>,
    pub tv_limit: f64,
    /// liminf over the tail of TV(f_k) minus TV(f); negative beyond the
    /// tolerance signals a lower-semicontinuity violation.
    pub gap: f64,
    pub violation: bool,
}

const LSC_TOL: f64 = 1e-9;

/// Check liminf TV_w(f_k) >= TV_w(f) for a sequence converging to f in the
/// discrete L1(w) norm.
pub fn lsc_probe(sequence: &[GridFunction], f: &GridFunction, w: &Weight) -> Result<LscReport> {
    if sequence.is_empty() {
        return Err(WbvError::InvalidArgument("empty sequence".into()));
    }
    let ws = GridFunction::sample(f.grid(), |x| w.eval(x))?;
    let mut gaps = Vec::with_capacity(sequence.len());
    for fk in sequence {
        if fk.grid() != f.grid() {
            return Err(WbvError::InvalidArgument(
                "sequence member on a different grid".into(),
            ));
        }
        let diff = GridFunction::new(
            f.grid().clone(),
            fk.values().iter().zip(f.values()).map(|(a, b)| a - b).collect(),
        )?;
        gaps.push(diff.l1_weighted(&ws));
    }
    let scale = f.l1_weighted(&ws).max(1.0);
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let head = gaps[0];
    let tail_start = 3 * gaps.len() / 4;
    let last = *gaps.last().unwrap();
    let converging = min_gap <= 0.05 * scale && last <= head + 1e-12;
    if !converging {
        return Err(WbvError::NonConvergentSequence { gaps });
    }
    let tv_sequence: Vec<f64> = sequence
        .iter()
        .map(|fk| weighted_tv(fk, w).map(|r| r.value))
        .collect::<Result<_>>()?;
    let tv_limit = weighted_tv(f, w)?.value;
    let tail_liminf = tv_sequence[tail_start..]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let gap = tail_liminf - tv_limit;
    Ok(LscReport {
        l1_gaps: gaps,
        tv_sequence,
        tv_limit,
        gap,
        violation: gap < -LSC_TOL,
    })
}
