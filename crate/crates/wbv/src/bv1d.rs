//! Exact one-dimensional weighted BV calculus for piecewise-smooth functions
//! with finitely many jumps: closed-form variation, endpoint perimeter,
//! mollified-indicator variation, and the jump-point approximability probe.

use crate::error::{Result, WbvError};
use crate::mollify::standard_mollifier;
use crate::quad;
use crate::weight::Weight;
use serde::{Deserialize, Serialize};

/// A smooth expression on an open interval, with an exact derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Const(f64),
    Linear { slope: f64, intercept: f64 },
    /// Coefficients low-to-high: c0 + c1 x + c2 x^2 + ...
    Poly(Vec<f64>),
    Sin { amplitude: f64, frequency: f64, phase: f64 },
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Linear { slope, intercept } => slope * x + intercept,
            Expr::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            Expr::Sin { amplitude, frequency, phase } => {
                amplitude * (frequency * x + phase).sin()
            }
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Expr::Const(_) => 0.0,
            Expr::Linear { slope, .. } => *slope,
            Expr::Poly(c) => {
                let mut acc = 0.0;
                for (i, &ci) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * x + i as f64 * ci;
                }
                acc
            }
            Expr::Sin { amplitude, frequency, phase } => {
                amplitude * frequency * (frequency * x + phase).cos()
            }
        }
    }
}

/// Piecewise-smooth function on the line: pieces[i] lives on the open
/// interval between breakpoints i-1 and i (unbounded at the ends), and
/// jumps[j] is the right minus left limit at breakpoint j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFunction1D {
    breakpoints: Vec<f64>,
    pieces: Vec<Expr>,
    jumps: Vec<f64>,
}

impl PiecewiseFunction1D {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Expr>, jumps: Vec<f64>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(WbvError::InvalidArgument(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if jumps.len() != breakpoints.len() {
            return Err(WbvError::InvalidArgument(format!(
                "{} breakpoints need {} jumps, got {}",
                breakpoints.len(),
                breakpoints.len(),
                jumps.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(WbvError::InvalidArgument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        for (j, &x) in breakpoints.iter().enumerate() {
            let expect = pieces[j + 1].eval(x) - pieces[j].eval(x);
            if (expect - jumps[j]).abs() > 1e-10 * (1.0 + expect.abs()) {
                return Err(WbvError::Inconsistency(format!(
                    "jump at breakpoint {x}: declared {} vs piece limits {expect}",
                    jumps[j]
                )));
            }
        }
        Ok(Self { breakpoints, pieces, jumps })
    }

    /// Indicator of the open interval (a, b).
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(
            vec![a, b],
            vec![Expr::Const(0.0), Expr::Const(1.0), Expr::Const(0.0)],
            vec![1.0, -1.0],
        )
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        self.pieces[i].eval(x)
    }

    /// Left-sided limit at x: the piece strictly left of x evaluated there.
    pub fn eval_left(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < x);
        self.pieces[i].eval(x)
    }
}

/// Weighted 1-D variation over the open interval (a, b): quadrature of
/// |f'| w over the smooth pieces plus |jump| * w at each interior breakpoint.
/// An infinite weight at a jump makes the variation +inf.
pub fn variation_1d(
    f: &PiecewiseFunction1D,
    w: &Weight,
    interval: (f64, f64),
) -> Result<f64> {
    let (a, b) = interval;
    if !(b > a) {
        return Err(WbvError::InvalidArgument(format!(
            "empty interval ({a}, {b})"
        )));
    }
    let splits = w.singular_points_1d();
    let mut cuts = vec![a];
    cuts.extend(f.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    let mut total = 0.0;
    for win in cuts.windows(2) {
        // Each sub-range lies in a single piece; pick it by its midpoint.
        let mid = 0.5 * (win[0] + win[1]);
        let i = f.breakpoints.partition_point(|&bp| bp <= mid);
        let piece = &f.pieces[i];
        total += quad::integrate_split(
            |x| piece.deriv(x).abs() * w.eval1(x),
            win[0],
            win[1],
            &splits,
            1e-8,
        )?;
    }
    for (j, &x) in f.breakpoints.iter().enumerate() {
        if x > a && x < b && f.jumps[j] != 0.0 {
            total += f.jumps[j].abs() * w.eval1(x);
        }
    }
    Ok(total)
}

/// Weighted perimeter of a finite union of disjoint open intervals:
/// the sum of w over the endpoints.
pub fn perimeter_1d(intervals: &[(f64, f64)], w: &Weight) -> Result<f64> {
    // Validate disjointness and ordering.
    let _ = crate::shape::ShapeSet::intervals(intervals.to_vec())?;
    let mut total = 0.0;
    for &(a, b) in intervals {
        total += w.eval1(a) + w.eval1(b);
    }
    Ok(total)
}

/// Weighted variation of the mollified indicator of (a, b) at scale eps:
/// the derivative is eta_eps(x - a) - eta_eps(x - b), whose bumps are
/// disjoint for eps < (b - a)/4.
pub fn mollified_indicator_tv(a: f64, b: f64, w: &Weight, eps: f64) -> Result<f64> {
    if !(b > a) {
        return Err(WbvError::InvalidArgument(format!(
            "need a < b, got ({a}, {b})"
        )));
    }
    if !(eps > 0.0 && eps < (b - a) / 4.0) {
        return Err(WbvError::InvalidArgument(format!(
            "eps must lie in (0, (b-a)/4), got {eps}"
        )));
    }
    let m = standard_mollifier(1);
    let splits = w.singular_points_1d();
    let mut total = 0.0;
    for center in [a, b] {
        total += quad::integrate_split(
            |x| m.eval1(x - center, eps) * w.eval1(x),
            center - eps,
            center + eps,
            &splits,
            1e-10,
        )?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomProbe {
    pub location: f64,
    pub jump: f64,
    /// (eps, average of |w(y) - w(x)| over (x-eps, x+eps)) along the schedule.
    pub averages: Vec<(f64, f64)>,
    pub limit_estimate: f64,
    pub lebesgue_point: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximabilityReport1D {
    pub atoms: Vec<AtomProbe>,
    /// True when every jump point is a Lebesgue point of w; the absolutely
    /// continuous part needs no probing (almost every point is a Lebesgue
    /// point by the differentiation theorem).
    pub approximable: bool,
}

const LEBESGUE_TOL: f64 = 1e-3;

/// Shrinking averages of |w - w(x)| at each jump point of f.
pub fn approximability_probe_1d(
    f: &PiecewiseFunction1D,
    w: &Weight,
) -> Result<ApproximabilityReport1D> {
    let splits = w.singular_points_1d();
    let mut atoms = Vec::new();
    for (j, &x) in f.breakpoints.iter().enumerate() {
        if f.jumps[j] == 0.0 {
            continue;
        }
        let wx = w.eval1(x);
        let mut averages = Vec::new();
        let mut eps = 0.1;
        for _ in 0..10 {
            let avg = if wx.is_finite() {
                quad::integrate_split(
                    |y| (w.eval1(y) - wx).abs(),
                    x - eps,
                    x + eps,
                    &splits,
                    1e-9,
                )? / (2.0 * eps)
            } else {
                f64::INFINITY
            };
            averages.push((eps, avg));
            eps *= 0.5;
        }
        let limit_estimate = averages.last().unwrap().1;
        let scale = if wx.is_finite() { wx.abs().max(1.0) } else { 1.0 };
        let lebesgue_point = limit_estimate <= LEBESGUE_TOL * scale;
        atoms.push(AtomProbe {
            location: x,
            jump: f.jumps[j],
            averages,
            limit_estimate,
            lebesgue_point,
        });
    }
    let approximable = atoms.iter().all(|a| a.lebesgue_point);
    Ok(ApproximabilityReport1D { atoms, approximable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, BoxDomain, GridFunction};
    use crate::variation::weighted_tv;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn indicator_infinite_variation_power_weight() {
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let v = variation_1d(&f, &Weight::power(-0.5), (-2.0, 2.0)).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn indicator_step_weight_is_three() {
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let v = variation_1d(&f, &w, (-2.0, 2.0)).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn smooth_piece_quadrature() {
        // f(x) = x^2 on (0,1), no jumps: int_0^1 |2x| dx = 1.
        let f = PiecewiseFunction1D::new(
            vec![],
            vec![Expr::Poly(vec![0.0, 0.0, 1.0])],
            vec![],
        )
        .unwrap();
        let v = variation_1d(&f, &Weight::constant(1.0), (0.0, 1.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inconsistent_jump_rejected() {
        let r = PiecewiseFunction1D::new(
            vec![0.0],
            vec![Expr::Const(0.0), Expr::Const(1.0)],
            vec![0.5],
        );
        assert!(matches!(r, Err(WbvError::Inconsistency(_))));
    }

    #[test]
    fn perimeter_values() {
        assert_eq!(
            perimeter_1d(&[(0.0, 1.0)], &Weight::constant(1.0)).unwrap(),
            2.0
        );
        assert!(perimeter_1d(&[(0.0, 1.0)], &Weight::power(-0.5))
            .unwrap()
            .is_infinite());
        let v = perimeter_1d(&[(0.0, 1.0), (2.0, 3.0)], &Weight::affine_1d(1.0, 1.0)).unwrap();
        assert_eq!(v, 10.0);
        assert!(perimeter_1d(&[(0.0, 2.0), (1.0, 3.0)], &Weight::constant(1.0)).is_err());
    }

    #[test]
    fn variation_equals_perimeter_for_indicators() {
        let w = Weight::affine_1d(0.5, 2.0);
        let f = PiecewiseFunction1D::indicator(-0.5, 1.25).unwrap();
        let v = variation_1d(&f, &w, (-3.0, 3.0)).unwrap();
        let p = perimeter_1d(&[(-0.5, 1.25)], &w).unwrap();
        assert!((v - p).abs() < 1e-12);
    }

    #[test]
    fn mollified_indicator_step_weight() {
        // The remark's family f_k = eta_{1/k} * chi_{(-1/k, 1)}: one bump
        // sits wholly in the w = 1 region, the other in the w = 2 region,
        // so the variation is exactly 3 for every k.
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        for k in [10.0f64, 100.0] {
            let v = mollified_indicator_tv(-1.0 / k, 1.0, &w, 1.0 / k).unwrap();
            assert!((v - 3.0).abs() < 1e-6, "k={k}: {v}");
        }
    }

    #[test]
    fn mollified_indicator_unit_weight() {
        let v = mollified_indicator_tv(0.0, 1.0, &Weight::constant(1.0), 0.2).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mollified_indicator_concentrates_at_endpoints() {
        // w(x) = x + 2: masses concentrate at a = 0 and b = 1, so the value
        // approaches w(0) + w(1) = 5 as eps shrinks.
        let w = Weight::affine_1d(1.0, 2.0);
        // For an affine weight the bump average is exactly the endpoint
        // value (the odd part cancels), so every eps gives w(0) + w(1) = 5.
        for eps in [0.2, 0.05, 0.01] {
            let v = mollified_indicator_tv(0.0, 1.0, &w, eps).unwrap();
            assert!((v - 5.0).abs() < 1e-8, "eps={eps}: {v}");
        }
        // A curved weight converges at order eps^2.
        let wq = Weight::radial(crate::weight::RadialProfile::Quadratic { a: 1.0, b: 2.0 });
        let mut prev_err = f64::INFINITY;
        for eps in [0.2, 0.05, 0.01] {
            let v = mollified_indicator_tv(0.0, 1.0, &wq, eps).unwrap();
            let err = (v - (2.0 + 3.0)).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-3, "final error {prev_err}");
        assert!(mollified_indicator_tv(0.0, 1.0, &w, 0.3).is_err());
    }

    #[test]
    fn approximability_step_weight_at_jump() {
        // Averages of |w - w(0)| at 0 tend to |2 - 1| / 2 = 1/2.
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let rep = approximability_probe_1d(&f, &w).unwrap();
        assert!(!rep.approximable);
        let atom0 = &rep.atoms[0];
        assert!((atom0.limit_estimate - 0.5).abs() < 1e-9);
        assert!(!atom0.lebesgue_point);
        // The atom at 1 sits in the locally constant region: Lebesgue point.
        assert!(rep.atoms[1].lebesgue_point);
    }

    #[test]
    fn approximability_continuous_weight() {
        let f = PiecewiseFunction1D::indicator(0.0, 1.0).unwrap();
        let rep =
            approximability_probe_1d(&f, &Weight::affine_1d(1.0, 2.0)).unwrap();
        assert!(rep.approximable);
        for atom in &rep.atoms {
            assert!(atom.lebesgue_point, "atom at {}", atom.location);
        }
    }

    #[test]
    fn jump_off_threshold_is_approximable() {
        let f = PiecewiseFunction1D::new(
            vec![0.5],
            vec![Expr::Const(0.0), Expr::Const(2.0)],
            vec![2.0],
        )
        .unwrap();
        let rep = approximability_probe_1d(&f, &Weight::step(0, 0.0, 1.0, 2.0)).unwrap();
        assert!(rep.approximable);
    }

    #[test]
    fn matches_grid_tv_for_continuous_weight() {
        // Piecewise-linear f with a jump, affine weight: grid TV within
        // 2h * (data Lipschitz constant) of the closed form.
        let f = PiecewiseFunction1D::new(
            vec![0.0],
            vec![
                Expr::Linear { slope: 1.0, intercept: 0.0 },
                Expr::Linear { slope: -0.5, intercept: 2.0 },
            ],
            vec![2.0],
        )
        .unwrap();
        let w = Weight::affine_1d(0.25, 1.5);
        let exact = variation_1d(&f, &w, (-2.0, 2.0)).unwrap();
        for n in [64usize, 256, 1024] {
            let g = make_grid(&BoxDomain::interval(-2.0, 2.0).unwrap(), &[n]).unwrap();
            let h = g.spacing()[0];
            let fg = GridFunction::sample(&g, |x| f.eval(x[0])).unwrap();
            let v = weighted_tv(&fg, &w).unwrap().value;
            let lip = 8.0; // generous bound on the data constants
            assert!((v - exact).abs() <= 2.0 * h * lip, "n={n}: {v} vs {exact}");
        }
    }

    #[test]
    fn classical_variation_random_piecewise_linear() {
        // 50 random piecewise-linear functions: closed form against the
        // sup over a fine partition that brackets each breakpoint.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..50 {
            let m = rng.gen_range(1..5);
            let mut bps: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.8..1.8)).collect();
            bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            bps.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let mut pieces = Vec::new();
            let mut jumps = Vec::new();
            let mut piece = Expr::Linear {
                slope: rng.gen_range(-3.0..3.0),
                intercept: rng.gen_range(-1.0..1.0),
            };
            pieces.push(piece.clone());
            for &x in &bps {
                let jump = rng.gen_range(-2.0..2.0);
                let left = piece.eval(x);
                let slope = rng.gen_range(-3.0..3.0);
                let intercept = left + jump - slope * x;
                piece = Expr::Linear { slope, intercept };
                pieces.push(piece.clone());
                jumps.push(jump);
            }
            let f = PiecewiseFunction1D::new(bps.clone(), pieces, jumps).unwrap();
            let closed = variation_1d(&f, &Weight::constant(1.0), (-2.0, 2.0)).unwrap();
            // Fine partition with points straddling each breakpoint.
            let mut pts: Vec<f64> = (0..=20000).map(|i| -2.0 + 4.0 * i as f64 / 20000.0).collect();
            for &x in &bps {
                pts.push(x - 1e-9);
                pts.push(x + 1e-9);
            }
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let sampled: f64 = pts
                .windows(2)
                .map(|p| (f.eval(p[1]) - f.eval(p[0])).abs())
                .sum();
            assert!(
                (closed - sampled).abs() <= 1e-2 * (1.0 + sampled),
                "trial {trial}: closed {closed} vs sampled {sampled}"
            );
        }
    }
}
