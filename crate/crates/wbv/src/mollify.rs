//! The standard compactly supported mollifier and the smooth-approximation
//! engine: dyadic interior covers with a smooth partition of unity, per-piece
//! mollification scales chosen by a halving search, the mollified sum with
//! convergence diagnostics, and the weight-approximability probe.

use crate::bv1d::{self, PiecewiseFunction1D};
use crate::domain::{BoxDomain, Grid, GridFunction};
use crate::error::{Result, WbvError};
use crate::quad;
use crate::util::{pairwise_sum, weighted_term};
use crate::variation::{gradient_magnitude, weighted_tv};
use crate::weight::Weight;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// exp(1/(|x|^2 - 1)) on the open unit ball, 0 outside, normalized to unit
/// mass in the given dimension.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    dim: usize,
    norm: f64,
}

fn unnormalized(r2: f64) -> f64 {
    if r2 < 1.0 {
        (1.0 / (r2 - 1.0)).exp()
    } else {
        0.0
    }
}

fn normalization(dim: usize) -> f64 {
    static NORMS: OnceLock<[f64; 3]> = OnceLock::new();
    let norms = NORMS.get_or_init(|| {
        // 1-D mass, then radial shells: int_0^1 e^{1/(r^2-1)} s_n r^{n-1} dr
        // with s_2 = 2 pi, s_3 = 4 pi.
        let m1 = quad::integrate(|x| unnormalized(x * x), -1.0, 1.0, 1e-12)
            .expect("mollifier mass");
        let m2 = quad::integrate(
            |r| unnormalized(r * r) * std::f64::consts::TAU * r,
            0.0,
            1.0,
            1e-12,
        )
        .expect("mollifier mass");
        let m3 = quad::integrate(
            |r| unnormalized(r * r) * 2.0 * std::f64::consts::TAU * r * r,
            0.0,
            1.0,
            1e-12,
        )
        .expect("mollifier mass");
        [m1, m2, m3]
    });
    norms[dim - 1]
}

impl Mollifier {
    pub fn standard(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2, or 3");
        Self { dim, norm: normalization(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Kernel value at `x` for scale `eps`.
    pub fn eval_scaled(&self, x: &[f64], eps: f64) -> f64 {
        let r2: f64 = x.iter().map(|&c| (c / eps) * (c / eps)).sum();
        unnormalized(r2) / (self.norm * eps.powi(self.dim as i32))
    }

    /// 1-D shorthand.
    pub fn eval1(&self, x: f64, eps: f64) -> f64 {
        self.eval_scaled(&[x], eps)
    }
}

/// Convenience constructor for the unit-mass bump.
pub fn standard_mollifier(dim: usize) -> Mollifier {
    Mollifier::standard(dim)
}

/// Discrete mollification on the grid: a convolution with kernel weights
/// normalized to unit sum, zero-extending f outside the domain. Exact on
/// locally constant regions.
pub fn mollify_grid(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    if !(eps > 0.0) {
        return Err(WbvError::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let g = f.grid();
    let dim = g.dim();
    let m = Mollifier::standard(dim);
    let radii: Vec<i64> = (0..dim)
        .map(|a| (eps / g.spacing()[a]).ceil() as i64)
        .collect();
    // Enumerate kernel offsets and weights once.
    let mut offsets: Vec<(Vec<i64>, f64)> = Vec::new();
    let mut idx: Vec<i64> = radii.iter().map(|&r| -r).collect();
    'outer: loop {
        let x: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(a, &k)| k as f64 * g.spacing()[a])
            .collect();
        let v = m.eval_scaled(&x, eps);
        if v > 0.0 {
            offsets.push((idx.clone(), v));
        }
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] <= radii[a] {
                continue 'outer;
            }
            idx[a] = -radii[a];
        }
        break;
    }
    let total: f64 = offsets.iter().map(|(_, v)| v).sum();
    if total <= 0.0 {
        // Kernel narrower than a cell: identity.
        return Ok(f.clone());
    }
    for o in &mut offsets {
        o.1 /= total;
    }
    let mut out = vec![0.0; g.num_cells()];
    for flat in 0..g.num_cells() {
        let base = g.multi_index(flat);
        let mut acc = 0.0;
        for (off, wgt) in &offsets {
            let mut ok = true;
            let mut shifted = Vec::with_capacity(dim);
            for a in 0..dim {
                let k = base[a] as i64 + off[a];
                if k < 0 || k >= g.resolution()[a] as i64 {
                    ok = false;
                    break;
                }
                shifted.push(k as usize);
            }
            if ok {
                acc += wgt * f.values()[g.flat_index(&shifted)];
            }
        }
        out[flat] = acc;
    }
    GridFunction::new(g.clone(), out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MollifierBoundReport {
    pub a1_used: f64,
    /// sup over centers of (eta_eps * w)(x) / ([w] w(x)).
    pub max_ratio: f64,
    pub argmax_center: Vec<f64>,
}

/// Check the convolution bound eta_eps * w <= [w] w at every cell center.
pub fn mollifier_weight_bound(w: &Weight, eps: f64, grid: &Grid) -> Result<MollifierBoundReport> {
    let a1 = w.known_a1().ok_or_else(|| {
        WbvError::InvalidArgument("weight carries no A1 constant".into())
    })?;
    let dim = grid.dim();
    let m = Mollifier::standard(dim);
    let mut max_ratio = 0.0f64;
    let mut argmax = vec![0.0; dim];
    if dim == 1 {
        let splits = w.singular_points_1d();
        for c in grid.centers() {
            let x = c[0];
            let wx = w.eval1(x);
            if wx.is_infinite() {
                continue;
            }
            let conv = quad::integrate_split(
                |y| m.eval1(x - y, eps) * w.eval1(y),
                x - eps,
                x + eps,
                &splits,
                1e-9,
            )?;
            let ratio = conv / (a1 * wx);
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax = c;
            }
        }
    } else {
        let samples = GridFunction::sample(grid, |x| w.eval(x))?;
        let conv = mollify_grid(&samples, eps)?;
        for (i, c) in grid.centers().enumerate() {
            let wx = samples.values()[i];
            if wx.is_infinite() || conv.values()[i].is_infinite() {
                continue;
            }
            let ratio = conv.values()[i] / (a1 * wx);
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax = c;
            }
        }
    }
    Ok(MollifierBoundReport { a1_used: a1, max_ratio, argmax_center: argmax })
}

/// Smooth step: 0 for u <= 0, 1 for u >= 1.
fn smooth_step(u: f64) -> f64 {
    let s = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
    let a = s(u);
    let b = s(1.0 - u);
    if a + b == 0.0 {
        // u is 0 or 1 exactly at floating point.
        if u >= 0.5 {
            1.0
        } else {
            0.0
        }
    } else {
        a / (a + b)
    }
}

/// Interior cover of a box by boundary-distance bands: a core where
/// dist(x, boundary) > D/4 (D twice the inradius) plus dyadic shells, with a
/// smooth partition of unity built from bump quotients in the distance
/// variable. Any point lies in at most 3 bands.
#[derive(Debug, Clone)]
pub struct CoverPartition {
    domain: BoxDomain,
    depth: usize,
    d: f64,
}

pub const COVER_OVERLAP_BOUND: usize = 4;

impl CoverPartition {
    pub fn num_pieces(&self) -> usize {
        self.depth
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Distance band (lower, upper) of piece k (1-based; piece 1 is the
    /// core with upper = +inf).
    pub fn band(&self, k: usize) -> (f64, f64) {
        assert!(k >= 1 && k <= self.depth);
        if k == 1 {
            (self.d / 4.0, f64::INFINITY)
        } else {
            let p = 0.5f64.powi(k as i32);
            (0.5 * p * self.d, 2.0 * p * self.d)
        }
    }

    /// Unnormalized bump of piece k at boundary distance t.
    fn psi_t(&self, k: usize, t: f64) -> f64 {
        let (a, b) = self.band(k);
        if k == 1 {
            smooth_step((t - a) / (a / 2.0))
        } else {
            let margin = (b - a) / 4.0;
            smooth_step((t - a) / margin) * smooth_step((b - t) / margin)
        }
    }

    fn psi(&self, k: usize, x: &[f64]) -> f64 {
        self.psi_t(k, self.domain.boundary_distance(x))
    }

    fn psi_sum(&self, t: f64) -> f64 {
        (1..=self.depth).map(|k| self.psi_t(k, t)).sum()
    }

    /// Normalized partition member; zero where the cover does not reach.
    pub fn zeta(&self, k: usize, x: &[f64]) -> f64 {
        let t = self.domain.boundary_distance(x);
        let s = self.psi_sum(t);
        if s > 0.0 {
            self.psi_t(k, t) / s
        } else {
            0.0
        }
    }

    /// Gradient of zeta_k: the partition depends on x only through the
    /// 1-Lipschitz boundary distance, so d zeta = zeta'(t) grad t with
    /// grad t = +/- e_axis of the nearest face.
    pub fn zeta_gradient(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let dim = self.domain.dim();
        let t = self.domain.boundary_distance(x);
        let delta = 1e-7 * self.d;
        let zp = {
            let z = |tt: f64| {
                let s = self.psi_sum(tt);
                if s > 0.0 {
                    self.psi_t(k, tt) / s
                } else {
                    0.0
                }
            };
            (z(t + delta) - z((t - delta).max(0.0))) / (2.0 * delta)
        };
        // Nearest boundary face determines the distance direction.
        let mut best_axis = 0;
        let mut best_sign = 1.0;
        let mut best = f64::INFINITY;
        for i in 0..dim {
            let lo = x[i] - self.domain.lower()[i];
            let hi = self.domain.upper()[i] - x[i];
            if lo < best {
                best = lo;
                best_axis = i;
                best_sign = 1.0;
            }
            if hi < best {
                best = hi;
                best_axis = i;
                best_sign = -1.0;
            }
        }
        let mut g = vec![0.0; dim];
        g[best_axis] = zp * best_sign;
        g
    }

    /// Number of bands whose bump is positive at x.
    pub fn overlap_count(&self, x: &[f64]) -> usize {
        (1..=self.depth).filter(|&k| self.psi(k, x) > 0.0).count()
    }

    /// Boundary distance below which the truncated cover has no member.
    pub fn coverage_floor(&self) -> f64 {
        self.band(self.depth).0
    }
}

/// Build the truncated interior cover with `depth` pieces.
pub fn build_cover(domain: &BoxDomain, depth: usize) -> Result<CoverPartition> {
    if depth < 1 {
        return Err(WbvError::InvalidArgument("depth must be at least 1".into()));
    }
    Ok(CoverPartition {
        domain: domain.clone(),
        depth,
        d: 2.0 * domain.inradius(),
    })
}

/// Check that the cover reaches every cell where f is nonzero.
pub fn check_coverage(cover: &CoverPartition, f: &GridFunction) -> Result<()> {
    let mut uncovered = 0usize;
    for (i, c) in f.grid().centers().enumerate() {
        if f.values()[i] != 0.0 && cover.psi_sum(cover.domain.boundary_distance(&c)) <= 0.0 {
            uncovered += 1;
        }
    }
    if uncovered == 0 {
        Ok(())
    } else {
        Err(WbvError::Coverage { uncovered })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceSchedule {
    pub piece: usize,
    pub eps_k: f64,
    /// Geometric certificate: eps_k at most half the piece's distance to the
    /// boundary, so mollification cannot leak outside the domain or past the
    /// neighboring bands.
    pub containment_ok: bool,
    pub l1_residual: f64,
    pub grad_residual: f64,
    /// The target 2^{-k} eps both residuals must stay below.
    pub target: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub eps: f64,
    pub pieces: Vec<PieceSchedule>,
}

/// Per-piece mollification scales: halve from eps/2 until the piece's
/// weighted residuals fall below 2^{-k} eps, with a floor of two cells.
pub fn choose_epsilons(
    f: &GridFunction,
    w: &Weight,
    cover: &CoverPartition,
    eps: f64,
) -> Result<EpsilonSchedule> {
    if !(eps > 0.0) {
        return Err(WbvError::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let g = f.grid();
    let ws = GridFunction::sample(g, |x| w.eval(x))?;
    let hmax = g.spacing().iter().cloned().fold(0.0, f64::max);
    let floor = 2.0 * hmax;
    let dim = g.dim();
    let mut pieces = Vec::new();
    for k in 1..=cover.num_pieces() {
        let target = 0.5f64.powi(k as i32) * eps;
        let zeta: Vec<f64> = g.centers().map(|c| cover.zeta(k, &c)).collect();
        let fz = GridFunction::new(
            g.clone(),
            f.values().iter().zip(&zeta).map(|(a, b)| a * b).collect(),
        )?;
        let fgz: Vec<Vec<f64>> = {
            let mut comps = vec![vec![0.0; g.num_cells()]; dim];
            for (i, c) in g.centers().enumerate() {
                let gz = cover.zeta_gradient(k, &c);
                for a in 0..dim {
                    comps[a][i] = f.values()[i] * gz[a];
                }
            }
            comps
        };
        let margin = cover.band(k).0;
        let mut eps_k = eps / 2.0;
        loop {
            let conv = mollify_grid(&fz, eps_k)?;
            let l1 = weighted_diff_l1(&conv, &fz, &ws);
            let mut grad_sq = vec![0.0; g.num_cells()];
            for comp in fgz.iter() {
                let cf = GridFunction::new(g.clone(), comp.clone())?;
                let cc = mollify_grid(&cf, eps_k)?;
                for i in 0..g.num_cells() {
                    let d = cc.values()[i] - comp[i];
                    grad_sq[i] += d * d;
                }
            }
            let hv = g.cell_volume();
            let grad_terms: Vec<f64> = grad_sq
                .iter()
                .zip(ws.values())
                .map(|(&s, &wv)| weighted_term(wv, s.sqrt()) * hv)
                .collect();
            let grad = pairwise_sum(&grad_terms);
            let contained = eps_k <= 0.5 * margin;
            if l1 < target && grad < target && contained && eps_k >= floor {
                pieces.push(PieceSchedule {
                    piece: k,
                    eps_k,
                    containment_ok: true,
                    l1_residual: l1,
                    grad_residual: grad,
                    target,
                });
                break;
            }
            if eps_k * 0.5 < floor {
                return Err(WbvError::Resolution {
                    piece: k,
                    residual: l1.max(grad),
                    target,
                });
            }
            eps_k *= 0.5;
        }
    }
    Ok(EpsilonSchedule { eps, pieces })
}

fn weighted_diff_l1(a: &GridFunction, b: &GridFunction, ws: &GridFunction) -> f64 {
    let hv = a.grid().cell_volume();
    let terms: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .zip(ws.values())
        .map(|((&x, &y), &wv)| weighted_term(wv, (x - y).abs()) * hv)
        .collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothApproxDiagnostics {
    pub schedule: EpsilonSchedule,
    pub l1_error: f64,
    pub tv_input: f64,
    pub tv_output: f64,
    pub tv_ratio: f64,
}

/// The mollified sum f_eps = sum_k (f zeta_k) * eta_{eps_k}.
pub fn smooth_approximate(
    f: &GridFunction,
    w: &Weight,
    eps: f64,
    depth: usize,
) -> Result<(GridFunction, SmoothApproxDiagnostics)> {
    let g = f.grid();
    let cover = build_cover(g.domain(), depth)?;
    check_coverage(&cover, f)?;
    let schedule = choose_epsilons(f, w, &cover, eps)?;
    let ws = GridFunction::sample(g, |x| w.eval(x))?;
    let mut out = GridFunction::zeros(g);
    for (k, piece) in schedule.pieces.iter().enumerate() {
        let k1 = k + 1;
        let fz = GridFunction::new(
            g.clone(),
            g.centers()
                .enumerate()
                .map(|(i, c)| f.values()[i] * cover.zeta(k1, &c))
                .collect(),
        )?;
        let conv = mollify_grid(&fz, piece.eps_k)?;
        for i in 0..g.num_cells() {
            out.values_mut()[i] += conv.values()[i];
        }
    }
    let l1_error = weighted_diff_l1(&out, f, &ws);
    let tv_input = weighted_tv(f, w)?.value;
    let tv_output = weighted_tv(&out, w)?.value;
    let tv_ratio = if tv_input > 0.0 {
        tv_output / tv_input
    } else {
        1.0
    };
    Ok((
        out,
        SmoothApproxDiagnostics { schedule, l1_error, tv_input, tv_output, tv_ratio },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxVerdict {
    Approximable,
    NotApproximable,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximabilityReport {
    pub verdict: ApproxVerdict,
    pub atom_traces: Vec<(Vec<f64>, f64)>,
    /// Lemma-style corollary: an approximable f stays approximable for
    /// w^{1/2}.
    pub delta_half_flag: bool,
}

pub enum ProbeTarget<'a> {
    Piecewise(&'a PiecewiseFunction1D),
    Grid(&'a GridFunction),
}

/// Probe whether the jump set of f sits at Lebesgue points of w.
pub fn approximability_probe(target: ProbeTarget<'_>, w: &Weight) -> Result<ApproximabilityReport> {
    match target {
        ProbeTarget::Piecewise(f) => {
            let rep = bv1d::approximability_probe_1d(f, w)?;
            let atom_traces = rep
                .atoms
                .iter()
                .map(|a| (vec![a.location], a.limit_estimate))
                .collect();
            let verdict = if rep.approximable {
                ApproxVerdict::Approximable
            } else {
                ApproxVerdict::NotApproximable
            };
            let delta_half_flag = if rep.approximable {
                let wd = w.pow_delta(0.5)?;
                bv1d::approximability_probe_1d(f, &wd)?.approximable
            } else {
                false
            };
            Ok(ApproximabilityReport { verdict, atom_traces, delta_half_flag })
        }
        ProbeTarget::Grid(f) => probe_grid(f, w),
    }
}

fn probe_grid(f: &GridFunction, w: &Weight) -> Result<ApproximabilityReport> {
    let g = f.grid();
    let mags = gradient_magnitude(f);
    let max_mag = mags.iter().cloned().fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Ok(ApproximabilityReport {
            verdict: ApproxVerdict::Approximable,
            atom_traces: vec![],
            delta_half_flag: true,
        });
    }
    let ws = GridFunction::sample(g, |x| w.eval(x))?;
    let mut atom_traces = Vec::new();
    let mut any_bad = false;
    let mut any_unclear = false;
    for (i, c) in g.centers().enumerate() {
        if mags[i] < 0.5 * max_mag {
            continue;
        }
        let wx = ws.values()[i];
        if wx.is_infinite() {
            atom_traces.push((c.clone(), f64::INFINITY));
            any_bad = true;
            continue;
        }
        // Shrinking grid-ball averages of |w - w(x)|, down to a 2-cell radius.
        let hmax = g.spacing().iter().cloned().fold(0.0, f64::max);
        let mut last = f64::INFINITY;
        let mut radius = 32.0 * hmax;
        while radius >= 2.0 * hmax {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (j, cj) in g.centers().enumerate() {
                let d2: f64 = c.iter().zip(&cj).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 <= radius * radius {
                    let wv = ws.values()[j];
                    sum += if wv.is_finite() { (wv - wx).abs() } else { f64::INFINITY };
                    count += 1;
                }
            }
            if count > 0 {
                last = sum / count as f64;
            }
            radius *= 0.5;
        }
        let scale = wx.abs().max(1.0);
        atom_traces.push((c.clone(), last));
        if last > 1e-2 * scale {
            any_bad = true;
        } else if last > 1e-3 * scale {
            any_unclear = true;
        }
    }
    let verdict = if any_bad {
        ApproxVerdict::NotApproximable
    } else if any_unclear {
        ApproxVerdict::Inconclusive
    } else {
        ApproxVerdict::Approximable
    };
    Ok(ApproximabilityReport {
        verdict,
        atom_traces,
        delta_half_flag: verdict == ApproxVerdict::Approximable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::make_grid;
    use crate::weight::RadialProfile;

    fn grid_1d(a: f64, b: f64, n: usize) -> Grid {
        make_grid(&BoxDomain::interval(a, b).unwrap(), &[n]).unwrap()
    }

    fn indicator01(g: &Grid) -> GridFunction {
        GridFunction::sample(g, |x| {
            if x[0] > 0.0 && x[0] < 1.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn unit_mass_1d() {
        let m = standard_mollifier(1);
        for eps in [1.0, 0.25, 0.01] {
            let mass = quad::integrate(|x| m.eval1(x, eps), -eps, eps, 1e-12).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "eps={eps}: {mass}");
        }
    }

    #[test]
    fn unit_mass_2d_radial() {
        let m = standard_mollifier(2);
        let mass = quad::integrate(
            |r| m.eval_scaled(&[r, 0.0], 1.0) * std::f64::consts::TAU * r,
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn compact_support_symmetry_and_peak_scaling() {
        let m = standard_mollifier(1);
        assert_eq!(m.eval1(1.0, 1.0), 0.0);
        assert_eq!(m.eval1(-1.2, 1.0), 0.0);
        assert!((m.eval1(0.3, 1.0) - m.eval1(-0.3, 1.0)).abs() < 1e-15);
        assert!(m.eval1(0.0, 1.0) > m.eval1(0.5, 1.0));
        let peak1 = m.eval1(0.0, 0.5);
        let peak2 = m.eval1(0.0, 1.0);
        assert!((peak1 - 2.0 * peak2).abs() < 1e-12);
        let m2 = standard_mollifier(2);
        let p1 = m2.eval_scaled(&[0.0, 0.0], 0.5);
        let p2 = m2.eval_scaled(&[0.0, 0.0], 1.0);
        assert!((p1 - 4.0 * p2).abs() < 1e-12 * p1);
    }

    #[test]
    fn grid_mollify_preserves_constants_and_mass() {
        let g = grid_1d(-2.0, 2.0, 256);
        let c = GridFunction::sample(&g, |_| 3.0).unwrap();
        let mc = mollify_grid(&c, 0.1).unwrap();
        // Zero-extension bites only within one kernel radius of the boundary.
        for (i, x) in g.centers().enumerate() {
            if g.domain().boundary_distance(&x) > 0.11 {
                assert!((mc.values()[i] - 3.0).abs() < 1e-12);
            }
        }
        let f = indicator01(&g);
        let mf = mollify_grid(&f, 0.05).unwrap();
        let h = g.spacing()[0];
        let mass: f64 = mf.values().iter().sum::<f64>() * h;
        let mass0: f64 = f.values().iter().sum::<f64>() * h;
        assert!((mass - mass0).abs() < 1e-12, "{mass} vs {mass0}");
    }

    #[test]
    fn mollifier_bound_constant_weight() {
        let g = grid_1d(-1.0, 1.0, 64);
        let rep = mollifier_weight_bound(&Weight::constant(1.0), 0.1, &g).unwrap();
        assert!((rep.max_ratio - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mollifier_bound_step_and_power() {
        let g = grid_1d(-2.0, 2.0, 512);
        let step = Weight::step(0, 0.0, 1.0, 2.0).with_a1(2.0);
        let rep = mollifier_weight_bound(&step, 0.1, &g).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-8, "step ratio {}", rep.max_ratio);

        let power = Weight::power(-0.5).with_a1(2.0);
        for eps in [0.2, 0.05] {
            let rep = mollifier_weight_bound(&power, eps, &g).unwrap();
            assert!(
                rep.max_ratio <= 1.0 + 1e-8,
                "power ratio {} at eps {eps} (argmax {:?})",
                rep.max_ratio,
                rep.argmax_center
            );
        }
    }

    #[test]
    fn cover_partition_of_unity_and_overlap() {
        let dom = BoxDomain::interval(0.0, 1.0).unwrap();
        let cover = build_cover(&dom, 4).unwrap();
        let g = make_grid(&dom, &[1024]).unwrap();
        for c in g.centers() {
            let t = dom.boundary_distance(&c);
            if t > cover.coverage_floor() {
                let s: f64 = (1..=cover.num_pieces()).map(|k| cover.zeta(k, &c)).sum();
                assert!((s - 1.0).abs() < 1e-10, "partition sum {s} at {c:?}");
            }
            assert!(cover.overlap_count(&c) <= COVER_OVERLAP_BOUND);
        }
    }

    #[test]
    fn cover_depth_two_covers_middle_third() {
        let dom = BoxDomain::interval(0.0, 1.0).unwrap();
        let cover = build_cover(&dom, 2).unwrap();
        let g = make_grid(&dom, &[512]).unwrap();
        let f = GridFunction::sample(&g, |x| {
            if x[0] > 1.0 / 3.0 && x[0] < 2.0 / 3.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        check_coverage(&cover, &f).unwrap();
        // A function hugging the boundary is not covered at depth 2.
        let edge = GridFunction::sample(&g, |x| if x[0] < 0.01 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(
            check_coverage(&cover, &edge),
            Err(WbvError::Coverage { .. })
        ));
    }

    #[test]
    fn epsilon_schedule_zero_function() {
        let dom = BoxDomain::interval(0.0, 1.0).unwrap();
        let g = make_grid(&dom, &[1024]).unwrap();
        let f = GridFunction::zeros(&g);
        let cover = build_cover(&dom, 3).unwrap();
        let sched = choose_epsilons(&f, &Weight::constant(1.0), &cover, 1e-2).unwrap();
        assert_eq!(sched.pieces.len(), 3);
        for p in &sched.pieces {
            assert_eq!(p.l1_residual, 0.0);
            assert_eq!(p.grad_residual, 0.0);
            assert!(p.containment_ok);
        }
    }

    #[test]
    fn epsilon_schedule_indicator() {
        let dom = BoxDomain::interval(0.0, 1.0).unwrap();
        let g = make_grid(&dom, &[8192]).unwrap();
        let f = GridFunction::sample(&g, |x| {
            if x[0] > 0.4 && x[0] < 0.6 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let cover = build_cover(&dom, 3).unwrap();
        for w in [Weight::constant(1.0), Weight::step(0, 0.5, 1.0, 2.0)] {
            let sched = choose_epsilons(&f, &w, &cover, 1e-2).unwrap();
            for p in &sched.pieces {
                assert!(p.l1_residual < p.target, "{p:?}");
                assert!(p.grad_residual < p.target, "{p:?}");
                assert!(p.containment_ok);
            }
        }
    }

    #[test]
    fn epsilon_schedule_resolution_error() {
        let dom = BoxDomain::interval(0.0, 1.0).unwrap();
        let g = make_grid(&dom, &[32]).unwrap();
        let f = GridFunction::sample(&g, |x| {
            if x[0] > 0.4 && x[0] < 0.6 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let cover = build_cover(&dom, 3).unwrap();
        match choose_epsilons(&f, &Weight::constant(1.0), &cover, 1e-4) {
            Err(WbvError::Resolution { .. }) => {}
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn smooth_approximate_l1_error_below_eps() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = make_grid(&dom, &[8192]).unwrap();
        let f = indicator01(&g);
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let (_, diag) = smooth_approximate(&f, &w, 1e-2, 3).unwrap();
        assert!(diag.l1_error < 1e-2, "L1 error {}", diag.l1_error);
    }

    #[test]
    fn smooth_approximate_smooth_input_ratio_one() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = make_grid(&dom, &[4096]).unwrap();
        // Compactly supported smooth bump so the truncated cover reaches all
        // of the support.
        let m = standard_mollifier(1);
        let f = GridFunction::sample(&g, |x| m.eval1(x[0], 1.5)).unwrap();
        let (_, diag) = smooth_approximate(&f, &Weight::constant(1.0), 1e-2, 3).unwrap();
        assert!(
            (diag.tv_ratio - 1.0).abs() < 2e-2,
            "TV ratio {} for a smooth input",
            diag.tv_ratio
        );
    }

    #[test]
    fn smooth_approximate_continuous_weight_converges_to_tv() {
        // w(x) = x^2 + 2 is continuous, so the indicator of (0,1) is
        // approximable and the mollified TV tends to w(0) + w(1) = 5.
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = make_grid(&dom, &[8192]).unwrap();
        let f = indicator01(&g);
        let w = Weight::radial(RadialProfile::Quadratic { a: 1.0, b: 2.0 });
        let mut last_ratio = f64::INFINITY;
        for eps in [4e-2, 1e-2] {
            let (_, diag) = smooth_approximate(&f, &w, eps, 3).unwrap();
            // Weight samples sit at cell centers, half a cell off the jump,
            // so the discrete TV is O(h) accurate.
            assert!((diag.tv_input - 5.0).abs() < 5e-3, "tv_input {}", diag.tv_input);
            last_ratio = diag.tv_ratio;
        }
        assert!(
            (last_ratio - 1.0).abs() < 2e-2,
            "limiting ratio {last_ratio} should approach 1"
        );
    }

    #[test]
    fn smooth_approximate_step_weight_bracket() {
        // Non-approximable case: the limit lies in [TV, [w] TV]; the plain
        // partition-of-unity family lands near 3.5 (the jump at 0 picks up
        // the two-sided average 3/2 instead of w(0) = 1).
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = make_grid(&dom, &[8192]).unwrap();
        let f = indicator01(&g);
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let (_, diag) = smooth_approximate(&f, &w, 1e-2, 3).unwrap();
        assert_eq!(diag.tv_input, 3.0);
        assert!(
            diag.tv_output >= 3.0 * 0.99 && diag.tv_output <= 2.0 * 3.0 * 1.01,
            "TV {} outside the bracket [3, 6]",
            diag.tv_output
        );
        assert!((diag.tv_output - 3.5).abs() < 0.15, "expected ~3.5, got {}", diag.tv_output);
    }

    #[test]
    fn lsc_floor_along_eps_schedule() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = make_grid(&dom, &[8192]).unwrap();
        let f = indicator01(&g);
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        for eps in [4e-2, 2e-2, 1e-2] {
            let (_, diag) = smooth_approximate(&f, &w, eps, 3).unwrap();
            assert!(diag.tv_output >= diag.tv_input - 1e-9);
        }
    }

    #[test]
    fn probe_piecewise_delegates() {
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let rep = approximability_probe(
            ProbeTarget::Piecewise(&f),
            &Weight::step(0, 0.0, 1.0, 2.0),
        )
        .unwrap();
        assert_eq!(rep.verdict, ApproxVerdict::NotApproximable);
        assert!(!rep.delta_half_flag);
        assert!((rep.atom_traces[0].1 - 0.5).abs() < 1e-9);

        let cont = approximability_probe(
            ProbeTarget::Piecewise(&f),
            &Weight::radial(RadialProfile::Quadratic { a: 1.0, b: 2.0 }),
        )
        .unwrap();
        assert_eq!(cont.verdict, ApproxVerdict::Approximable);
        assert!(cont.delta_half_flag);
    }

    #[test]
    fn probe_grid_indicator() {
        let g = grid_1d(-2.0, 2.0, 1024);
        let f = indicator01(&g);
        let rep =
            approximability_probe(ProbeTarget::Grid(&f), &Weight::step(0, 0.0, 1.0, 2.0))
                .unwrap();
        assert_eq!(rep.verdict, ApproxVerdict::NotApproximable);
        let cont = approximability_probe(
            ProbeTarget::Grid(&f),
            &Weight::radial(RadialProfile::Quadratic { a: 1.0, b: 2.0 }),
        )
        .unwrap();
        assert_ne!(cont.verdict, ApproxVerdict::NotApproximable);
    }
}
