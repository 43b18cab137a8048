//! Weights w : R^n -> (0, inf] with lower-semicontinuity metadata and an
//! optional known A1 constant.
//!
//! The mini-language understood by [`parse_weight`] covers the CLI surface:
//! `const(1)`, `power(alpha=-0.5)`, `step(threshold=0, low=1, high=2, axis=0)`,
//! `radial(profile=affine, a=1, b=1)`, `affine(slope=1, intercept=2)`.

use crate::domain::GridFunction;
use crate::error::{Result, WbvError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadialProfile {
    /// a r + b
    Affine { a: f64, b: f64 },
    /// a r^2 + b
    Quadratic { a: f64, b: f64 },
    /// (1 + r)^alpha
    ShiftedPower { alpha: f64 },
    /// 1 for r <= 1, r^alpha for r > 1
    CutoffPower { alpha: f64 },
}

impl RadialProfile {
    fn eval(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Affine { a, b } => a * r + b,
            RadialProfile::Quadratic { a, b } => a * r * r + b,
            RadialProfile::ShiftedPower { alpha } => (1.0 + r).powf(alpha),
            RadialProfile::CutoffPower { alpha } => {
                if r <= 1.0 {
                    1.0
                } else {
                    r.powf(alpha)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightKind {
    Const(f64),
    /// |x|^alpha
    Power { alpha: f64 },
    /// `low` where x[axis] <= threshold, `high` otherwise.
    Step { axis: usize, threshold: f64, low: f64, high: f64 },
    /// slope * x + intercept, 1-D only.
    Affine1D { slope: f64, intercept: f64 },
    Radial(RadialProfile),
    Product(Vec<Weight>),
    /// Pointwise power base^delta.
    PowerOf { base: Box<Weight>, delta: f64 },
    /// Nearest-cell lookup into sampled values (Coifman-Rochberg output).
    Tabulated { samples: GridFunction },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    kind: WeightKind,
    lsc: bool,
    a1: Option<f64>,
}

impl Weight {
    pub fn new(kind: WeightKind, lsc: bool, a1: Option<f64>) -> Result<Self> {
        if let Some(c) = a1 {
            if !(c >= 1.0) {
                return Err(WbvError::InvalidArgument(format!(
                    "A1 constant must be >= 1 (got {c})"
                )));
            }
            if let WeightKind::Power { alpha } = kind {
                if alpha > 0.0 {
                    return Err(WbvError::InvalidArgument(
                        "power weights claim everywhere-A1 only for alpha <= 0".into(),
                    ));
                }
            }
        }
        Ok(Self { kind, lsc, a1 })
    }

    pub fn constant(c: f64) -> Self {
        Self { kind: WeightKind::Const(c), lsc: true, a1: Some(1.0) }
    }

    /// |x|^alpha. For alpha in [-1, 0) on the line the weight is everywhere
    /// A1; the caller supplies the constant where it is known.
    pub fn power(alpha: f64) -> Self {
        Self { kind: WeightKind::Power { alpha }, lsc: alpha <= 0.0, a1: None }
    }

    pub fn step(axis: usize, threshold: f64, low: f64, high: f64) -> Self {
        // Lower semicontinuous when the smaller value is attained at the jump.
        let lsc = low <= high;
        Self { kind: WeightKind::Step { axis, threshold, low, high }, lsc, a1: None }
    }

    pub fn affine_1d(slope: f64, intercept: f64) -> Self {
        Self { kind: WeightKind::Affine1D { slope, intercept }, lsc: true, a1: None }
    }

    pub fn radial(profile: RadialProfile) -> Self {
        Self { kind: WeightKind::Radial(profile), lsc: true, a1: None }
    }

    pub fn tabulated(samples: GridFunction, lsc: bool) -> Self {
        Self { kind: WeightKind::Tabulated { samples }, lsc, a1: None }
    }

    pub fn with_a1(mut self, c: f64) -> Self {
        self.a1 = Some(c);
        self
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn lsc_asserted(&self) -> bool {
        self.lsc
    }

    pub fn known_a1(&self) -> Option<f64> {
        self.a1
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            WeightKind::Const(c) => *c,
            WeightKind::Power { alpha } => crate::util::norm(x).powf(*alpha),
            WeightKind::Step { axis, threshold, low, high } => {
                if x[*axis] <= *threshold {
                    *low
                } else {
                    *high
                }
            }
            WeightKind::Affine1D { slope, intercept } => slope * x[0] + intercept,
            WeightKind::Radial(p) => p.eval(crate::util::norm(x)),
            WeightKind::Product(ws) => ws.iter().map(|w| w.eval(x)).product(),
            WeightKind::PowerOf { base, delta } => base.eval(x).powf(*delta),
            WeightKind::Tabulated { samples } => {
                let g = samples.grid();
                let mut idx = Vec::with_capacity(g.dim());
                for i in 0..g.dim() {
                    let t = (x[i] - g.domain().lower()[i]) / g.spacing()[i] - 0.5;
                    let k = t.round().max(0.0).min((g.resolution()[i] - 1) as f64);
                    idx.push(k as usize);
                }
                samples.values()[g.flat_index(&idx)]
            }
        }
    }

    /// 1-D evaluation shorthand.
    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    /// Points where a 1-D section of the weight is singular or discontinuous,
    /// for quadrature splitting.
    pub fn singular_points_1d(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::Const(_) | WeightKind::Affine1D { .. } => vec![],
            WeightKind::Power { .. } => vec![0.0],
            WeightKind::Step { threshold, .. } => vec![*threshold],
            WeightKind::Radial(p) => match p {
                RadialProfile::CutoffPower { .. } => vec![-1.0, 0.0, 1.0],
                _ => vec![0.0],
            },
            WeightKind::Product(ws) => {
                ws.iter().flat_map(|w| w.singular_points_1d()).collect()
            }
            WeightKind::PowerOf { base, .. } => base.singular_points_1d(),
            WeightKind::Tabulated { .. } => vec![],
        }
    }

    /// Points where the weight takes the value +inf.
    pub fn poles(&self, dim: usize) -> Vec<Vec<f64>> {
        match &self.kind {
            WeightKind::Power { alpha } if *alpha < 0.0 => vec![vec![0.0; dim]],
            WeightKind::Product(ws) => {
                ws.iter().flat_map(|w| w.poles(dim)).collect()
            }
            WeightKind::PowerOf { base, .. } => base.poles(dim),
            _ => vec![],
        }
    }

    /// Pointwise power w^delta for 0 < delta < 1. The known A1 constant
    /// transfers as [w]^delta.
    pub fn pow_delta(&self, delta: f64) -> Result<Weight> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(WbvError::InvalidArgument(format!(
                "delta must lie in (0,1), got {delta}"
            )));
        }
        let a1 = self.a1.map(|c| c.powf(delta));
        let kind = match &self.kind {
            WeightKind::Const(c) => WeightKind::Const(c.powf(delta)),
            WeightKind::Power { alpha } => WeightKind::Power { alpha: alpha * delta },
            WeightKind::Step { axis, threshold, low, high } => WeightKind::Step {
                axis: *axis,
                threshold: *threshold,
                low: low.powf(delta),
                high: high.powf(delta),
            },
            _ => WeightKind::PowerOf { base: Box::new(self.clone()), delta },
        };
        Ok(Weight { kind, lsc: self.lsc, a1 })
    }
}

/// Parse the weight mini-language.
pub fn parse_weight(spec: &str) -> Result<Weight> {
    let spec = spec.trim();
    let open = spec
        .find('(')
        .ok_or_else(|| WbvError::Config(format!("weight spec `{spec}` lacks `(`")))?;
    if !spec.ends_with(')') {
        return Err(WbvError::Config(format!("weight spec `{spec}` lacks closing `)`")));
    }
    let name = spec[..open].trim();
    let body = &spec[open + 1..spec.len() - 1];
    let args = parse_args(body)?;
    let get = |key: &str| -> Option<f64> { args.iter().find(|(k, _)| k == key).map(|(_, v)| *v) };

    match name {
        "const" => {
            let c = get("value")
                .or_else(|| args.first().filter(|(k, _)| k.is_empty()).map(|(_, v)| *v))
                .ok_or_else(|| WbvError::Config("const(...) needs a value".into()))?;
            Ok(Weight::constant(c))
        }
        "power" => {
            let alpha = get("alpha")
                .ok_or_else(|| WbvError::Config("power(...) needs alpha".into()))?;
            let mut w = Weight::power(alpha);
            if (alpha + 0.5).abs() < 1e-12 {
                // |x|^{-1/2} on the line: over the pole-adapted window family
                // the averaging constant is exactly 2.
                w = w.with_a1(2.0);
            }
            Ok(w)
        }
        "step" => {
            let threshold = get("threshold").unwrap_or(0.0);
            let low = get("low").unwrap_or(1.0);
            let high = get("high").unwrap_or(2.0);
            let axis = get("axis").unwrap_or(0.0) as usize;
            let mut w = Weight::step(axis, threshold, low, high);
            if low > 0.0 && high > 0.0 {
                w = w.with_a1((low.max(high) / low.min(high)).max(1.0));
            }
            Ok(w)
        }
        "affine" => {
            let slope = get("slope").unwrap_or(1.0);
            let intercept = get("intercept").unwrap_or(0.0);
            Ok(Weight::affine_1d(slope, intercept))
        }
        "radial" => {
            let profile = args
                .iter()
                .find(|(k, _)| k == "profile")
                .map(|(_, v)| *v)
                .map(|_| ())
                .is_some();
            // profile is named, not numeric; re-scan the raw body.
            let _ = profile;
            let pname = body
                .split(',')
                .find_map(|part| {
                    let mut kv = part.splitn(2, '=');
                    let k = kv.next()?.trim();
                    let v = kv.next()?.trim();
                    (k == "profile").then(|| v.to_string())
                })
                .ok_or_else(|| WbvError::Config("radial(...) needs profile=".into()))?;
            let p = match pname.as_str() {
                "affine" => RadialProfile::Affine {
                    a: get("a").unwrap_or(1.0),
                    b: get("b").unwrap_or(0.0),
                },
                "quadratic" => RadialProfile::Quadratic {
                    a: get("a").unwrap_or(1.0),
                    b: get("b").unwrap_or(0.0),
                },
                "shifted_power" => RadialProfile::ShiftedPower {
                    alpha: get("alpha").unwrap_or(-0.5),
                },
                "cutoff_power" => RadialProfile::CutoffPower {
                    alpha: get("alpha").unwrap_or(-1.5),
                },
                other => {
                    return Err(WbvError::Config(format!("unknown radial profile `{other}`")))
                }
            };
            Ok(Weight::radial(p))
        }
        other => Err(WbvError::Config(format!("unknown weight kind `{other}`"))),
    }
}

fn parse_args(body: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in body.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((k, v)) = part.split_once('=') {
            let k = k.trim().to_string();
            if let Ok(num) = v.trim().parse::<f64>() {
                out.push((k, num));
            }
            // Non-numeric values (e.g. profile names) are re-scanned by callers.
        } else if let Ok(num) = part.parse::<f64>() {
            out.push((String::new(), num));
        } else {
            return Err(WbvError::Config(format!("cannot parse weight argument `{part}`")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, BoxDomain, GridFunction};

    #[test]
    fn power_weight_samples() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let g = make_grid(&d, &[4]).unwrap();
        let w = Weight::power(-0.5);
        let s = GridFunction::sample(&g, |x| w.eval(x)).unwrap();
        let expect = [0.75f64.powf(-0.5), 2.0, 2.0, 0.75f64.powf(-0.5)];
        for (a, b) in s.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn power_weight_infinite_at_origin() {
        let w = Weight::power(-0.5);
        assert_eq!(w.eval1(0.0), f64::INFINITY);
    }

    #[test]
    fn step_weight_samples() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let g = make_grid(&d, &[4]).unwrap();
        let w = Weight::step(0, 0.0, 1.0, 2.0);
        let s = GridFunction::sample(&g, |x| w.eval(x)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn constant_weight_everywhere() {
        let w = Weight::constant(1.0);
        assert_eq!(w.eval(&[123.0, -4.0]), 1.0);
        assert_eq!(w.known_a1(), Some(1.0));
    }

    #[test]
    fn delta_power_transfers_constant() {
        let w = Weight::constant(4.0);
        let wd = w.pow_delta(0.5).unwrap();
        assert_eq!(wd.eval1(0.3), 2.0);
        assert_eq!(wd.known_a1(), Some(1.0));

        let p = Weight::power(-0.5).with_a1(2.0);
        let pd = p.pow_delta(0.5).unwrap();
        assert!((pd.eval1(16.0) - 16.0f64.powf(-0.25)).abs() < 1e-14);
        assert!((pd.known_a1().unwrap() - 2f64.sqrt()).abs() < 1e-14);

        assert!(w.pow_delta(1.5).is_err());
        assert!(w.pow_delta(0.0).is_err());
    }

    #[test]
    fn parse_mini_language() {
        let w = parse_weight("power(alpha=-0.5)").unwrap();
        assert_eq!(w.known_a1(), Some(2.0));
        let s = parse_weight("step(threshold=0, low=1, high=2, axis=0)").unwrap();
        assert_eq!(s.eval1(-0.1), 1.0);
        assert_eq!(s.eval1(0.1), 2.0);
        assert_eq!(s.known_a1(), Some(2.0));
        let c = parse_weight("const(1)").unwrap();
        assert_eq!(c.eval1(5.0), 1.0);
        let r = parse_weight("radial(profile=affine, a=1, b=1)").unwrap();
        assert!((r.eval(&[3.0, 4.0]) - 6.0).abs() < 1e-14);
        assert!(parse_weight("bogus(1)").is_err());
    }
}
