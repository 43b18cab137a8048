//! Structural identities tying the pieces together: the coarea identity
//! (weighted variation as an integral of superlevel-set perimeters), the
//! subgraph lift that turns weighted variation in n dimensions into
//! unweighted variation in n+1, and the weighted Sobolev/isoperimetric
//! inequality checks with an empirically calibrated constant.

use crate::bv1d::{self, PiecewiseFunction1D};
use crate::domain::{make_grid, BoxDomain, Grid, GridFunction};
use crate::error::{Result, WbvError};
use crate::shape::ShapeSet;
use crate::util::{pairwise_sum, weighted_term};
use crate::variation::{weighted_perimeter, weighted_tv, weighted_tv_samples};
use crate::weight::Weight;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Coarea
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoareaReport {
    pub levels: Vec<f64>,
    pub per_level_perimeter: Vec<f64>,
    pub integral_estimate: f64,
    pub direct_value: f64,
    /// None when a level has infinite perimeter.
    pub relative_gap: Option<f64>,
}

pub enum CoareaTarget<'a> {
    Grid(&'a GridFunction),
    /// Piecewise 1-D function together with the interval it lives on.
    Piecewise(&'a PiecewiseFunction1D, (f64, f64)),
}

/// Compare the direct weighted variation against the midpoint-rule integral
/// of t -> perimeter of the superlevel set {f > t}.
pub fn coarea_check(target: CoareaTarget<'_>, w: &Weight, levels: usize) -> Result<CoareaReport> {
    if levels < 2 {
        return Err(WbvError::InvalidArgument(format!(
            "level count must be at least 2 (got {levels})"
        )));
    }
    match target {
        CoareaTarget::Grid(f) => coarea_grid(f, w, levels),
        CoareaTarget::Piecewise(f, interval) => coarea_piecewise(f, w, interval, levels),
    }
}

fn level_grid(lo: f64, hi: f64, count: usize) -> (Vec<f64>, f64) {
    // Midpoints of a uniform partition of [lo, hi]: levels never coincide
    // with plateau values such as 0 or 1 for indicators.
    let dt = (hi - lo) / count as f64;
    let levels = (0..count).map(|j| lo + (j as f64 + 0.5) * dt).collect();
    (levels, dt)
}

fn assemble_report(
    levels: Vec<f64>,
    perims: Vec<f64>,
    dt: f64,
    direct: f64,
) -> CoareaReport {
    let any_inf = perims.iter().any(|p| p.is_infinite());
    let integral = if any_inf {
        f64::INFINITY
    } else {
        pairwise_sum(&perims.iter().map(|&p| p * dt).collect::<Vec<_>>())
    };
    let relative_gap = if any_inf {
        None
    } else {
        Some((integral - direct).abs() / direct.abs().max(1e-300))
    };
    CoareaReport {
        levels,
        per_level_perimeter: perims,
        integral_estimate: integral,
        direct_value: direct,
        relative_gap,
    }
}

fn coarea_grid(f: &GridFunction, w: &Weight, levels: usize) -> Result<CoareaReport> {
    let lo = f.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = f.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(WbvError::InvalidArgument("f must be bounded".into()));
    }
    let (lv, dt) = level_grid(lo, hi, levels);
    let ws = GridFunction::sample(f.grid(), |x| w.eval(x))?;
    let mut perims = Vec::with_capacity(levels);
    for &t in &lv {
        let ind = f.map(|v| if v > t { 1.0 } else { 0.0 });
        perims.push(weighted_tv_samples(&ind, &ws)?);
    }
    let direct = weighted_tv_samples(f, &ws)?;
    Ok(assemble_report(lv, perims, dt, direct))
}

/// Locate the crossings of f = t on (a, b) by a scan at fine resolution
/// followed by bisection on the exact evaluator.
fn superlevel_crossings(f: &PiecewiseFunction1D, t: f64, a: f64, b: f64) -> Vec<f64> {
    const SCAN: usize = 8192;
    let h = (b - a) / SCAN as f64;
    let mut crossings = Vec::new();
    let mut prev_x = a + 0.5 * h;
    let mut prev_in = f.eval(prev_x) > t;
    for i in 1..SCAN {
        let x = a + (i as f64 + 0.5) * h;
        let inside = f.eval(x) > t;
        if inside != prev_in {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (f.eval(mid) > t) == prev_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut p = 0.5 * (lo + hi);
            // Jump crossings land on breakpoints of f; snap so the weight is
            // evaluated at the true jump location.
            let tol = 1e-9 * (b - a);
            if let Some(&bp) = f
                .breakpoints()
                .iter()
                .find(|&&bp| (bp - p).abs() < tol)
            {
                p = bp;
            }
            crossings.push(p);
        }
        prev_x = x;
        prev_in = inside;
    }
    crossings
}

fn coarea_piecewise(
    f: &PiecewiseFunction1D,
    w: &Weight,
    interval: (f64, f64),
    levels: usize,
) -> Result<CoareaReport> {
    let (a, b) = interval;
    if !(b > a) {
        return Err(WbvError::InvalidArgument("empty interval".into()));
    }
    // Bounds of f over the interval (fine sampling; pieces are smooth).
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    const SCAN: usize = 8192;
    for i in 0..SCAN {
        let v = f.eval(a + (i as f64 + 0.5) * (b - a) / SCAN as f64);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    // The scan can miss extremes attained exactly at breakpoints (one-sided
    // limits included), which matters for closed-form level ranges.
    for &bp in f.breakpoints() {
        if bp > a && bp < b {
            for side in [f.eval(bp), f.eval_left(bp)] {
                lo = lo.min(side);
                hi = hi.max(side);
            }
        }
    }
    if !(hi > lo) {
        // Constant function: zero variation, zero perimeters.
        let direct = bv1d::variation_1d(f, w, interval)?;
        return Ok(assemble_report(vec![0.5 * (lo + hi)], vec![0.0], hi - lo, direct));
    }
    let (lv, dt) = level_grid(lo, hi, levels);
    let mut perims = Vec::with_capacity(levels);
    for &t in &lv {
        let mut p = 0.0;
        for x in superlevel_crossings(f, t, a, b) {
            p += w.eval1(x);
        }
        perims.push(p);
    }
    let direct = bv1d::variation_1d(f, w, interval)?;
    Ok(assemble_report(lv, perims, dt, direct))
}

// ---------------------------------------------------------------------------
// Subgraph lift
// ---------------------------------------------------------------------------

pub enum EmbedObject<'a> {
    Function(&'a GridFunction),
    Set(&'a ShapeSet),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgraphScene {
    pub base_dim: usize,
    /// Height of the lifted box: max of w over the base grid.
    pub height: f64,
    pub lifted_grid: Grid,
    /// Cell centers (x, y) with y < w(x).
    pub inside: Vec<bool>,
    /// Lifted values: f(x) on inside cells (membership 0/1 for sets), 0
    /// elsewhere.
    pub lifted_values: Vec<f64>,
}

const DEFAULT_BASE_RES: usize = 256;

fn base_grid_for(object: &EmbedObject<'_>, omega: &BoxDomain) -> Result<Grid> {
    match object {
        EmbedObject::Function(f) => Ok(f.grid().clone()),
        EmbedObject::Set(s) => {
            let res = vec![DEFAULT_BASE_RES; s.dim().max(1)];
            make_grid(omega, &res)
        }
    }
}

fn base_value(object: &EmbedObject<'_>, i: usize, x: &[f64]) -> f64 {
    match object {
        EmbedObject::Function(f) => f.values()[i],
        EmbedObject::Set(s) => {
            if s.contains(x) {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Lift an object into the region under the graph of w over Omega.
pub fn subgraph_embed(
    object: EmbedObject<'_>,
    w: &Weight,
    omega: &BoxDomain,
    y_res: usize,
) -> Result<SubgraphScene> {
    let base = base_grid_for(&object, omega)?;
    let n = base.dim();
    let mut height = 0.0f64;
    for c in base.centers() {
        let v = w.eval(&c);
        if !v.is_finite() {
            return Err(WbvError::InvalidArgument(
                "weight is unbounded on the region; truncate it first".into(),
            ));
        }
        height = height.max(v);
    }
    if height <= 0.0 {
        return Err(WbvError::InvalidArgument("weight vanishes on the region".into()));
    }
    let mut lower = base.domain().lower().to_vec();
    let mut upper = base.domain().upper().to_vec();
    lower.push(0.0);
    upper.push(height);
    let mut res = base.resolution().to_vec();
    res.push(y_res);
    let lifted_grid = make_grid(&BoxDomain::new(lower, upper)?, &res)?;
    let mut inside = vec![false; lifted_grid.num_cells()];
    let mut lifted_values = vec![0.0; lifted_grid.num_cells()];
    for (j, c) in lifted_grid.centers().enumerate() {
        let (x, y) = (&c[..n], c[n]);
        if y < w.eval(x) {
            inside[j] = true;
            let base_idx = base.flat_index(
                &lifted_grid.multi_index(j)[..n].iter().cloned().collect::<Vec<_>>(),
            );
            lifted_values[j] = base_value(&object, base_idx, x);
        }
    }
    Ok(SubgraphScene { base_dim: n, height, lifted_grid, inside, lifted_values })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryReport {
    pub weighted_value: f64,
    pub lifted_value: f64,
    pub perimeter_gap: f64,
    pub l1_weighted: f64,
    pub l1_lifted: f64,
    pub l1_gap: f64,
    pub height: f64,
}

/// Compare the weighted perimeter/variation downstairs against the
/// unweighted variation of the lifted object inside the open subgraph
/// region, plus the two L1 norms.
///
/// The lifted variation counts base-direction jump faces clipped to the open
/// region y < w at the face itself: a face column only extends to the
/// weight's value there, which is what makes piecewise-constant weights with
/// face-aligned discontinuities exact.
pub fn isometry_check(
    object: EmbedObject<'_>,
    w: &Weight,
    omega: &BoxDomain,
    y_res: usize,
) -> Result<IsometryReport> {
    let base = base_grid_for(&object, omega)?;
    let n = base.dim();
    let mut height = 0.0f64;
    let wsamples = GridFunction::sample(&base, |x| w.eval(x))?;
    for &v in wsamples.values() {
        if !v.is_finite() {
            return Err(WbvError::InvalidArgument(
                "weight is unbounded on the region; truncate it first".into(),
            ));
        }
        height = height.max(v);
    }
    let h_y = height / y_res as f64;
    // Exact downstairs value.
    let weighted_value = match &object {
        EmbedObject::Function(f) => weighted_tv(f, w)?.value,
        EmbedObject::Set(s) => weighted_perimeter(s, w, omega)?.value,
    };
    // Base values on the base grid.
    let fvals: Vec<f64> = base
        .centers()
        .enumerate()
        .map(|(i, c)| base_value(&object, i, &c))
        .collect();
    // Lifted variation: for each base-direction face where the value jumps,
    // the visible column height is h_y times the number of y-cells whose
    // center sits below w at the face center.
    let hv = base.cell_volume();
    let mut lifted_value = 0.0;
    for axis in 0..n {
        let h_a = base.spacing()[axis];
        for flat in 0..base.num_cells() {
            let idx = base.multi_index(flat);
            if idx[axis] + 1 >= base.resolution()[axis] {
                continue;
            }
            let mut nb = idx.clone();
            nb[axis] += 1;
            let jump = (fvals[base.flat_index(&nb)] - fvals[flat]).abs();
            if jump == 0.0 {
                continue;
            }
            let mut face = base.center_of(&idx);
            face[axis] += 0.5 * h_a;
            let wf = w.eval(&face);
            let visible = (0..y_res)
                .take_while(|&j| (j as f64 + 0.5) * h_y < wf)
                .count();
            lifted_value += jump * (hv / h_a) * (visible as f64 * h_y);
        }
    }
    // L1 legs: downstairs sum |f| w h^n; upstairs exact column integration
    // of |Jf| over the subgraph region (Fubini).
    let l1_weighted = {
        let terms: Vec<f64> = fvals
            .iter()
            .zip(wsamples.values())
            .map(|(&f, &wv)| weighted_term(wv, f.abs()) * hv)
            .collect();
        pairwise_sum(&terms)
    };
    let l1_lifted = {
        let terms: Vec<f64> = fvals
            .iter()
            .zip(wsamples.values())
            .map(|(&f, &wv)| f.abs() * wv.min(height) * hv)
            .collect();
        pairwise_sum(&terms)
    };
    let scale = weighted_value.abs().max(1e-300);
    Ok(IsometryReport {
        weighted_value,
        lifted_value,
        perimeter_gap: (lifted_value - weighted_value).abs() / scale,
        l1_weighted,
        l1_lifted,
        l1_gap: (l1_lifted - l1_weighted).abs() / l1_weighted.abs().max(1e-300),
        height,
    })
}

// ---------------------------------------------------------------------------
// GNS / isoperimetric
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum GnsInput {
    Grid(GridFunction),
    Shape { set: ShapeSet, domain: BoxDomain },
}

impl GnsInput {
    pub fn dim(&self) -> usize {
        match self {
            GnsInput::Grid(f) => f.grid().dim(),
            GnsInput::Shape { set, .. } => set.dim(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnsReport {
    pub lhs: f64,
    pub rhs: f64,
    pub a1_used: f64,
    pub c1: f64,
    pub one_star: f64,
    /// Exponent on the A1 constant: 2/1* in general, 1/1* for approximable
    /// inputs.
    pub a1_power: f64,
    pub residual: f64,
}

/// Weighted volume of a shape by quadrature. Circles use a polar midpoint
/// tensor rule (exact area for constant weights); boxes and implicit shapes
/// rasterize over the ambient box.
pub fn weighted_volume(set: &ShapeSet, w: &Weight, domain: &BoxDomain) -> Result<f64> {
    match set {
        ShapeSet::Empty { .. } => Ok(0.0),
        ShapeSet::Intervals { intervals } => {
            let splits = w.singular_points_1d();
            let mut total = 0.0;
            for &(a, b) in intervals {
                total += crate::quad::integrate_split(|x| w.eval1(x), a, b, &splits, 1e-10)?;
            }
            Ok(total)
        }
        ShapeSet::Circle { center, radius } => {
            const NR: usize = 512;
            const NT: usize = 512;
            let dr = radius / NR as f64;
            let dt = std::f64::consts::TAU / NT as f64;
            let mut terms = Vec::with_capacity(NR * NT);
            for i in 0..NR {
                let r = (i as f64 + 0.5) * dr;
                for j in 0..NT {
                    let th = (j as f64 + 0.5) * dt;
                    let x = [center[0] + r * th.cos(), center[1] + r * th.sin()];
                    terms.push(w.eval(&x) * r * dr * dt);
                }
            }
            Ok(pairwise_sum(&terms))
        }
        _ => {
            const RES: usize = 512;
            let g = make_grid(domain, &vec![RES; domain.dim()])?;
            let hv = g.cell_volume();
            let terms: Vec<f64> = g
                .centers()
                .filter(|c| set.contains(c))
                .map(|c| w.eval(&c) * hv)
                .collect();
            Ok(pairwise_sum(&terms))
        }
    }
}

fn gns_sides(input: &GnsInput, w: &Weight, one_star: f64) -> Result<(f64, f64)> {
    let wd = w.pow_delta(1.0 / one_star)?;
    match input {
        GnsInput::Grid(f) => {
            let g = f.grid();
            let ws = GridFunction::sample(g, |x| w.eval(x))?;
            let hv = g.cell_volume();
            let terms: Vec<f64> = f
                .values()
                .iter()
                .zip(ws.values())
                .map(|(&v, &wv)| weighted_term(wv, v.abs().powf(one_star)) * hv)
                .collect();
            let lhs = pairwise_sum(&terms).powf(1.0 / one_star);
            let rhs = weighted_tv(f, &wd)?.value;
            Ok((lhs, rhs))
        }
        GnsInput::Shape { set, domain } => {
            let lhs = weighted_volume(set, w, domain)?.powf(1.0 / one_star);
            let rhs = weighted_perimeter(set, &wd, domain)?.value;
            Ok((lhs, rhs))
        }
    }
}

/// Check the weighted Sobolev inequality
/// ||f||_{L^{1*}(w)} <= C1 [w]^p ||Df||_{w^{1/1*}} with p = 2/1*
/// (p = 1/1* when the input is flagged approximable).
pub fn gns_check(
    input: &GnsInput,
    w: &Weight,
    c1: f64,
    approximable: bool,
) -> Result<GnsReport> {
    let n = input.dim();
    if n < 2 {
        return Err(WbvError::InvalidArgument(
            "the Sobolev exponent n/(n-1) needs dimension at least 2".into(),
        ));
    }
    let a1_used = w.known_a1().ok_or_else(|| {
        WbvError::InvalidArgument("weight carries no A1 constant".into())
    })?;
    let one_star = n as f64 / (n as f64 - 1.0);
    let a1_power = if approximable { 1.0 / one_star } else { 2.0 / one_star };
    let (lhs, rhs) = gns_sides(input, w, one_star)?;
    let residual = c1 * a1_used.powf(a1_power) * rhs - lhs;
    Ok(GnsReport { lhs, rhs, a1_used, c1, one_star, a1_power, residual })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoperimetricReport {
    pub weighted_volume: f64,
    pub boundary_term: f64,
    pub a1_used: f64,
    pub c1: f64,
    pub residual: f64,
}

/// Indicator specialization: (w(E))^{1/1*} <= C1 [w]^{2/1*} ||dE||_{w^{1/1*}}.
pub fn isoperimetric_check(
    set: &ShapeSet,
    w: &Weight,
    c1: f64,
    domain: &BoxDomain,
) -> Result<IsoperimetricReport> {
    let n = set.dim();
    if n < 2 {
        return Err(WbvError::InvalidArgument(
            "the Sobolev exponent n/(n-1) needs dimension at least 2".into(),
        ));
    }
    let a1_used = w.known_a1().ok_or_else(|| {
        WbvError::InvalidArgument("weight carries no A1 constant".into())
    })?;
    let one_star = n as f64 / (n as f64 - 1.0);
    let vol = weighted_volume(set, w, domain)?;
    let wd = w.pow_delta(1.0 / one_star)?;
    let boundary = weighted_perimeter(set, &wd, domain)?.value;
    let residual = c1 * a1_used.powf(2.0 / one_star) * boundary - vol.powf(1.0 / one_star);
    Ok(IsoperimetricReport {
        weighted_volume: vol,
        boundary_term: boundary,
        a1_used,
        c1,
        residual,
    })
}

/// One member of the calibration suite.
#[derive(Debug, Clone)]
pub struct GnsMember {
    pub name: String,
    pub input: GnsInput,
    pub weight: Weight,
    pub approximable: bool,
}

/// Smallest constant making every suite member's inequality hold:
/// max over members of LHS / ([w]^p RHS), with each member's own exponent.
pub fn empirical_c1(suite: &[GnsMember]) -> Result<f64> {
    if suite.is_empty() {
        return Err(WbvError::InvalidArgument("empty calibration suite".into()));
    }
    let mut c1 = 0.0f64;
    for member in suite {
        let n = member.input.dim();
        if n < 2 {
            return Err(WbvError::InvalidArgument(format!(
                "suite member {} has dimension {n} < 2",
                member.name
            )));
        }
        let a1 = member.weight.known_a1().ok_or_else(|| {
            WbvError::InvalidArgument(format!(
                "suite member {} carries no A1 constant",
                member.name
            ))
        })?;
        let one_star = n as f64 / (n as f64 - 1.0);
        let power = if member.approximable { 1.0 / one_star } else { 2.0 / one_star };
        let (lhs, rhs) = gns_sides(&member.input, &member.weight, one_star)?;
        if rhs == 0.0 {
            if lhs > 0.0 {
                return Err(WbvError::Inconsistency(format!(
                    "member {}: positive norm {lhs:.6e} with zero variation",
                    member.name
                )));
            }
            continue;
        }
        c1 = c1.max(lhs / (a1.powf(power) * rhs));
    }
    Ok(c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv1d::Expr;
    use crate::weight::RadialProfile;

    fn tent() -> PiecewiseFunction1D {
        PiecewiseFunction1D::new(
            vec![-1.0, 0.0, 1.0],
            vec![
                Expr::Const(0.0),
                Expr::Linear { slope: 1.0, intercept: 1.0 },
                Expr::Linear { slope: -1.0, intercept: 1.0 },
                Expr::Const(0.0),
            ],
            vec![0.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn coarea_indicator_step_weight() {
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let rep = coarea_check(CoareaTarget::Piecewise(&f, (-2.0, 2.0)), &w, 50).unwrap();
        assert!((rep.direct_value - 3.0).abs() < 1e-12);
        for &p in &rep.per_level_perimeter {
            assert!((p - 3.0).abs() < 1e-9, "level perimeter {p}");
        }
        assert!(rep.relative_gap.unwrap() < 1e-9);
    }

    #[test]
    fn coarea_tent_unweighted() {
        let rep =
            coarea_check(CoareaTarget::Piecewise(&tent(), (-2.0, 2.0)), &Weight::constant(1.0), 100)
                .unwrap();
        assert!((rep.direct_value - 2.0).abs() < 1e-12);
        assert!((rep.integral_estimate - 2.0).abs() < 1e-6);
        for &p in &rep.per_level_perimeter {
            assert!((p - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn coarea_tent_affine_weight_closed_form() {
        // Per-level perimeter w(t-1) + w(1-t) = 2(2-t); both sides equal 3.
        let w = Weight::radial(RadialProfile::Affine { a: 1.0, b: 1.0 });
        let rep = coarea_check(CoareaTarget::Piecewise(&tent(), (-2.0, 2.0)), &w, 200).unwrap();
        assert!((rep.direct_value - 3.0).abs() < 1e-10, "direct {}", rep.direct_value);
        for (t, p) in rep.levels.iter().zip(&rep.per_level_perimeter) {
            assert!((p - 2.0 * (2.0 - t)).abs() < 1e-6, "t={t}: {p}");
        }
        assert!(rep.relative_gap.unwrap() < 1e-2);
        let fine = coarea_check(CoareaTarget::Piecewise(&tent(), (-2.0, 2.0)), &w, 800).unwrap();
        assert!(fine.relative_gap.unwrap() < 2e-3);
        assert!(fine.relative_gap.unwrap() <= rep.relative_gap.unwrap());
    }

    #[test]
    fn coarea_power_weight_reports_infinite_levels() {
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let w = Weight::power(-0.5);
        let rep = coarea_check(CoareaTarget::Piecewise(&f, (-2.0, 2.0)), &w, 20).unwrap();
        assert!(rep.integral_estimate.is_infinite());
        assert!(rep.relative_gap.is_none());
    }

    #[test]
    fn coarea_grid_matches_piecewise() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = make_grid(&dom, &[2048]).unwrap();
        let f = GridFunction::sample(&g, |x| (1.0 - x[0].abs()).max(0.0)).unwrap();
        let w = Weight::radial(RadialProfile::Affine { a: 1.0, b: 1.0 });
        let rep = coarea_check(CoareaTarget::Grid(&f), &w, 200).unwrap();
        assert!((rep.direct_value - 3.0).abs() < 5e-3, "direct {}", rep.direct_value);
        assert!(rep.relative_gap.unwrap() < 1e-2, "gap {:?}", rep.relative_gap);
    }

    #[test]
    fn subgraph_constant_weight_box() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let shape = ShapeSet::interval(0.0, 1.0).unwrap();
        let scene =
            subgraph_embed(EmbedObject::Set(&shape), &Weight::constant(1.0), &dom, 32).unwrap();
        assert_eq!(scene.base_dim, 1);
        assert!((scene.height - 1.0).abs() < 1e-12);
        assert!(scene.inside.iter().all(|&b| b));
    }

    #[test]
    fn subgraph_step_weight_heights() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let shape = ShapeSet::interval(0.0, 1.0).unwrap();
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let scene = subgraph_embed(EmbedObject::Set(&shape), &w, &dom, 64).unwrap();
        assert!((scene.height - 2.0).abs() < 1e-12);
        let g = &scene.lifted_grid;
        for (j, c) in g.centers().enumerate() {
            let expected = c[1] < w.eval1(c[0]);
            assert_eq!(scene.inside[j], expected, "at {c:?}");
            if scene.inside[j] && c[0] > 0.0 && c[0] < 1.0 {
                assert_eq!(scene.lifted_values[j], 1.0);
            }
        }
    }

    #[test]
    fn subgraph_unbounded_weight_rejected() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let shape = ShapeSet::interval(0.0, 1.0).unwrap();
        // |x|^{-1/2} sampled at a grid hitting no pole is finite, so force
        // an actual infinity through a tabulated weight.
        let g = make_grid(&dom, &[DEFAULT_BASE_RES]).unwrap();
        let mut vals = vec![1.0; g.num_cells()];
        vals[10] = f64::INFINITY;
        let w = Weight::tabulated(GridFunction::new(g, vals).unwrap(), true);
        assert!(matches!(
            subgraph_embed(EmbedObject::Set(&shape), &w, &dom, 16),
            Err(WbvError::InvalidArgument(_))
        ));
    }

    #[test]
    fn isometry_step_weight_exact() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let shape = ShapeSet::interval(0.0, 1.0).unwrap();
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let rep = isometry_check(EmbedObject::Set(&shape), &w, &dom, 64).unwrap();
        assert_eq!(rep.weighted_value, 3.0);
        assert_eq!(rep.lifted_value, 3.0);
        assert_eq!(rep.perimeter_gap, 0.0);
        assert!(rep.l1_gap < 1e-12);
    }

    #[test]
    fn isometry_unit_weight_identity() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let shape = ShapeSet::interval(0.0, 1.0).unwrap();
        let rep = isometry_check(EmbedObject::Set(&shape), &Weight::constant(1.0), &dom, 16)
            .unwrap();
        assert_eq!(rep.weighted_value, 2.0);
        assert_eq!(rep.lifted_value, 2.0);
        assert!(rep.l1_gap < 1e-12);
    }

    #[test]
    fn isometry_continuous_weight_two_percent() {
        // w(x) = x + 2 on (-1, 2): P_w = w(0) + w(1) = 5.
        let dom = BoxDomain::interval(-1.0, 2.0).unwrap();
        let shape = ShapeSet::interval(0.0, 1.0).unwrap();
        let w = Weight::affine_1d(1.0, 2.0);
        let rep = isometry_check(EmbedObject::Set(&shape), &w, &dom, 256).unwrap();
        assert!((rep.weighted_value - 5.0).abs() < 0.05, "P_w {}", rep.weighted_value);
        assert!(rep.perimeter_gap <= 0.02, "gap {}", rep.perimeter_gap);
        assert!(rep.l1_gap < 1e-6);
    }

    #[test]
    fn gns_disk_ratio() {
        let dom = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let input = GnsInput::Shape { set: ShapeSet::unit_disk(), domain: dom };
        let rep = gns_check(&input, &Weight::constant(1.0), 1.0, false).unwrap();
        let pi = std::f64::consts::PI;
        assert!((rep.lhs - pi.sqrt()).abs() < 0.02 * pi.sqrt(), "lhs {}", rep.lhs);
        assert!((rep.rhs - 2.0 * pi).abs() < 0.02 * 2.0 * pi, "rhs {}", rep.rhs);
        let ratio = rep.lhs / rep.rhs;
        let expected = 1.0 / (2.0 * pi.sqrt());
        assert!((ratio - expected).abs() < 0.02 * expected, "ratio {ratio}");
    }

    #[test]
    fn gns_dimension_one_rejected() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let input = GnsInput::Shape { set: ShapeSet::interval(0.0, 1.0).unwrap(), domain: dom };
        assert!(gns_check(&input, &Weight::constant(1.0), 1.0, false).is_err());
    }

    #[test]
    fn gns_zero_function_nonnegative_residual() {
        let dom = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let g = make_grid(&dom, &[64, 64]).unwrap();
        let input = GnsInput::Grid(GridFunction::zeros(&g));
        let rep = gns_check(&input, &Weight::constant(1.0), 0.3, false).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.residual >= 0.0);
    }

    #[test]
    fn gns_scale_invariance() {
        let dom = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let g = make_grid(&dom, &[128, 128]).unwrap();
        let bump = |x: &[f64]| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 < 1.0 {
                (1.0 - r2).powi(2)
            } else {
                0.0
            }
        };
        let base = GridFunction::sample(&g, bump).unwrap();
        let rep1 =
            gns_check(&GnsInput::Grid(base.clone()), &Weight::constant(1.0), 0.3, false).unwrap();
        for c in [0.1, 10.0] {
            let scaled = base.map(|v| c * v);
            let rep =
                gns_check(&GnsInput::Grid(scaled), &Weight::constant(1.0), 0.3, false).unwrap();
            assert!((rep.lhs - c * rep1.lhs).abs() < 1e-9 * c * rep1.lhs);
            assert!((rep.rhs - c * rep1.rhs).abs() < 1e-9 * c * rep1.rhs);
            assert_eq!(rep.residual > 0.0, rep1.residual > 0.0);
        }
    }

    #[test]
    fn empirical_c1_single_disk() {
        let dom = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let suite = vec![GnsMember {
            name: "disk".into(),
            input: GnsInput::Shape { set: ShapeSet::unit_disk(), domain: dom },
            weight: Weight::constant(1.0),
            approximable: false,
        }];
        let c1 = empirical_c1(&suite).unwrap();
        let expected = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
        assert!((c1 - expected).abs() < 0.02 * expected, "c1 {c1}");
    }

    #[test]
    fn empirical_c1_scaled_disks_agree() {
        let dom = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let mut c1s = Vec::new();
        for r in [0.25, 0.5, 1.0] {
            let suite = vec![GnsMember {
                name: format!("disk-{r}"),
                input: GnsInput::Shape {
                    set: ShapeSet::disk([0.0, 0.0], r),
                    domain: dom.clone(),
                },
                weight: Weight::constant(1.0),
                approximable: false,
            }];
            c1s.push(empirical_c1(&suite).unwrap());
        }
        for pair in c1s.windows(2) {
            assert!((pair[0] - pair[1]).abs() < 1e-9 * pair[0]);
        }
    }

    #[test]
    fn isoperimetric_square() {
        let dom = BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).unwrap();
        let square = ShapeSet::Boxes {
            boxes: vec![BoxDomain::rect([0.0, 0.0], [1.0, 1.0]).unwrap()],
        };
        let rep = isoperimetric_check(&square, &Weight::constant(1.0), 0.3, &dom).unwrap();
        assert!((rep.weighted_volume - 1.0).abs() < 1e-2);
        assert!((rep.boundary_term - 4.0).abs() < 1e-9);
        assert!(rep.residual > 0.0);
        let empty = ShapeSet::Empty { dim: 2 };
        let rep0 = isoperimetric_check(&empty, &Weight::constant(1.0), 0.3, &dom).unwrap();
        assert_eq!(rep0.weighted_volume, 0.0);
        assert_eq!(rep0.residual, 0.0);
    }
}
