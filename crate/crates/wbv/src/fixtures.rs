//! Named fixtures shared by the experiment suite, the CLI, and the tests.
//!
//! Each fixture bundles a function or shape with a weight and the domain it
//! lives on; the registry is deterministic so reports are stable across runs.

use crate::analysis::{GnsInput, GnsMember};
use crate::bv1d::{Expr, PiecewiseFunction1D};
use crate::domain::{make_grid, BoxDomain, Grid, GridFunction};
use crate::error::Result;
use crate::measure::Measure;
use crate::shape::ShapeSet;
use crate::weight::{RadialProfile, Weight};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

/// Stable catalog of the named fixtures.
pub fn catalog() -> Vec<FixtureInfo> {
    vec![
        FixtureInfo {
            name: "step-remark",
            summary: "indicator of (0,1) on (-2,2) under the step weight (1 left of 0, 2 right); weighted variation exactly 3",
        },
        FixtureInfo {
            name: "tent",
            summary: "tent function max(0, 1-|x|) on (-2,2); coarea fixture with weight |x|+1 giving closed-form value 3",
        },
        FixtureInfo {
            name: "slab",
            summary: "horizontal slab |y|<1 in a long box under the cutoff weight min(1, r^{-3/2}); finite weighted perimeter, growing unweighted one",
        },
        FixtureInfo {
            name: "disk",
            summary: "unit disk in the plane; isoperimetric ratio sqrt(pi) : 2 pi",
        },
        FixtureInfo {
            name: "power-weight",
            summary: "|x|^{-1/2} on (-2,2); A1 constant 2 over one-sided and pole-centered windows",
        },
        FixtureInfo {
            name: "step-weight",
            summary: "step weight on (-2,2); A1 constant 2 from asymmetric straddles",
        },
        FixtureInfo {
            name: "measure-lebesgue",
            summary: "Lebesgue measure on the line; maximal-function ratio identically 1",
        },
        FixtureInfo {
            name: "measure-dirac",
            summary: "unit mass at the origin; maximal function 1/|x|, vanishing ratio at infinity",
        },
        FixtureInfo {
            name: "measure-dyadic",
            summary: "atoms of mass 2^k at the integers k >= 1; maximal function infinite everywhere",
        },
        FixtureInfo {
            name: "gns-suite",
            summary: "ten 2-D members (disks, squares, smooth bumps; constant, decaying-radial, and step weights) calibrating the Sobolev constant, plus five held-out shrunken copies",
        },
        FixtureInfo {
            name: "lsc-sequences",
            summary: "twenty seeded random smooth targets with oscillatory perturbations decaying in L1(w)",
        },
        FixtureInfo {
            name: "duality-fields",
            summary: "seeded random feasible dual fields for the indicator of (0,1), plus the hat field attaining the unweighted perimeter 2",
        },
    ]
}

pub const STEP_INTERVAL: (f64, f64) = (-2.0, 2.0);

pub fn step_weight() -> Weight {
    Weight::step(0, 0.0, 1.0, 2.0).with_a1(2.0)
}

pub fn power_weight() -> Weight {
    Weight::power(-0.5).with_a1(2.0)
}

pub fn step_remark() -> (PiecewiseFunction1D, Weight) {
    (
        PiecewiseFunction1D::indicator(0.0, 1.0).expect("indicator"),
        step_weight(),
    )
}

pub fn tent() -> PiecewiseFunction1D {
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
    .expect("tent")
}

/// Weight |x| + 1 used with the tent fixture.
pub fn tent_weight() -> Weight {
    Weight::radial(RadialProfile::Affine { a: 1.0, b: 1.0 })
}

/// Slab |y| < 1 inside the box (-l, l) x (-2, 2) with the cutoff radial
/// weight; the weighted perimeter converges as l grows.
pub fn slab(l: f64) -> (ShapeSet, Weight, BoxDomain) {
    let dom = BoxDomain::rect([-l, -2.0], [l, 2.0]).expect("slab box");
    let slab = ShapeSet::Boxes {
        boxes: vec![BoxDomain::rect([-l, -1.0], [l, 1.0]).expect("slab")],
    };
    let w = Weight::radial(RadialProfile::CutoffPower { alpha: -1.5 });
    (slab, w, dom)
}

pub fn plane() -> BoxDomain {
    BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).expect("plane box")
}

/// Sampled indicator of (0, 1) on a 1-D grid over (-2, 2).
pub fn indicator_grid(res: usize) -> GridFunction {
    let dom = BoxDomain::interval(STEP_INTERVAL.0, STEP_INTERVAL.1).expect("interval");
    let g = make_grid(&dom, &[res]).expect("grid");
    GridFunction::sample(&g, |x| if x[0] > 0.0 && x[0] < 1.0 { 1.0 } else { 0.0 })
        .expect("sample")
}

pub fn measure_fixture(name: &str) -> Option<Measure> {
    match name {
        "measure-lebesgue" => Some(Measure::lebesgue(1)),
        "measure-dirac" => Some(Measure::dirac(vec![0.0])),
        "measure-dyadic" => Some(Measure::dyadic_atoms_1d()),
        _ => None,
    }
}

/// Decaying radial weight used for continuous-weight Sobolev members; its
/// A1 constant is estimated on a grid at build time (a certified lower
/// bound, used consistently on both sides of the calibration).
fn decaying_radial_weight() -> Weight {
    let w = Weight::radial(RadialProfile::ShiftedPower { alpha: -0.5 });
    let g = make_grid(&plane(), &[96, 96]).expect("a1 grid");
    let fam = crate::weights::BallFamily::dyadic(&g);
    let est = crate::weights::estimate_a1_constant(&w, &g, &fam)
        .unwrap_or(1.0)
        .max(1.0);
    w.with_a1(est)
}

fn smooth_bump(grid: &Grid, scale: f64) -> GridFunction {
    GridFunction::sample(grid, |x| {
        let r2 = (x[0] * x[0] + x[1] * x[1]) / (scale * scale);
        if r2 < 1.0 {
            (1.0 - r2).powi(2)
        } else {
            0.0
        }
    })
    .expect("bump")
}

/// Ten-member calibration suite for the Sobolev/isoperimetric constant.
pub fn gns_suite() -> Vec<GnsMember> {
    let dom = plane();
    let g = make_grid(&dom, &[192, 192]).expect("gns grid");
    let radial = decaying_radial_weight();
    let step = step_weight();
    let mut suite = vec![
        GnsMember {
            name: "disk-unit".into(),
            input: GnsInput::Shape { set: ShapeSet::unit_disk(), domain: dom.clone() },
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "disk-half".into(),
            input: GnsInput::Shape {
                set: ShapeSet::disk([0.0, 0.0], 0.5),
                domain: dom.clone(),
            },
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "square-unit".into(),
            input: GnsInput::Shape {
                set: ShapeSet::Boxes {
                    boxes: vec![BoxDomain::rect([0.0, 0.0], [1.0, 1.0]).expect("sq")],
                },
                domain: dom.clone(),
            },
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "two-boxes".into(),
            input: GnsInput::Shape {
                set: ShapeSet::Boxes {
                    boxes: vec![
                        BoxDomain::rect([-1.5, -1.5], [-0.5, -0.5]).expect("b1"),
                        BoxDomain::rect([0.5, 0.5], [1.5, 1.5]).expect("b2"),
                    ],
                },
                domain: dom.clone(),
            },
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "disk-radial".into(),
            input: GnsInput::Shape { set: ShapeSet::unit_disk(), domain: dom.clone() },
            weight: radial.clone(),
            approximable: true,
        },
        GnsMember {
            name: "square-radial".into(),
            input: GnsInput::Shape {
                set: ShapeSet::Boxes {
                    boxes: vec![BoxDomain::rect([-0.5, -0.5], [0.5, 0.5]).expect("sq")],
                },
                domain: dom.clone(),
            },
            weight: radial.clone(),
            approximable: true,
        },
        GnsMember {
            name: "disk-step".into(),
            input: GnsInput::Shape { set: ShapeSet::unit_disk(), domain: dom.clone() },
            weight: step.clone(),
            approximable: false,
        },
        GnsMember {
            name: "square-step".into(),
            input: GnsInput::Shape {
                set: ShapeSet::Boxes {
                    boxes: vec![BoxDomain::rect([-0.5, -0.5], [0.5, 0.5]).expect("sq")],
                },
                domain: dom.clone(),
            },
            weight: step,
            approximable: false,
        },
        GnsMember {
            name: "bump-unit".into(),
            input: GnsInput::Grid(smooth_bump(&g, 1.0)),
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "bump-radial".into(),
            input: GnsInput::Grid(smooth_bump(&g, 1.2)),
            weight: radial,
            approximable: true,
        },
    ];
    debug_assert_eq!(suite.len(), 10);
    suite.sort_by(|a, b| a.name.cmp(&b.name));
    suite
}

/// Five held-out members: shrunken copies (factor 1/2) of suite members.
pub fn gns_holdout() -> Vec<GnsMember> {
    let dom = plane();
    let g = make_grid(&dom, &[192, 192]).expect("gns grid");
    let radial = decaying_radial_weight();
    vec![
        GnsMember {
            name: "holdout-disk".into(),
            input: GnsInput::Shape {
                set: ShapeSet::disk([0.0, 0.0], 0.25),
                domain: dom.clone(),
            },
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "holdout-square".into(),
            input: GnsInput::Shape {
                set: ShapeSet::Boxes {
                    boxes: vec![BoxDomain::rect([0.0, 0.0], [0.5, 0.5]).expect("sq")],
                },
                domain: dom.clone(),
            },
            weight: Weight::constant(1.0),
            approximable: true,
        },
        GnsMember {
            name: "holdout-disk-radial".into(),
            input: GnsInput::Shape {
                set: ShapeSet::disk([0.0, 0.0], 0.5),
                domain: dom.clone(),
            },
            weight: radial.clone(),
            approximable: true,
        },
        GnsMember {
            name: "holdout-disk-step".into(),
            input: GnsInput::Shape {
                set: ShapeSet::disk([0.0, 0.0], 0.5),
                domain: dom,
            },
            weight: step_weight(),
            approximable: false,
        },
        GnsMember {
            name: "holdout-bump".into(),
            input: GnsInput::Grid(smooth_bump(&g, 0.5)),
            weight: radial,
            approximable: true,
        },
    ]
}

/// Seeded convergent-sequence fixture: a smooth random target plus
/// oscillatory perturbations decaying in L1.
pub fn lsc_fixture(seed: u64) -> Result<(Vec<GridFunction>, GridFunction, Weight)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = BoxDomain::interval(-2.0, 2.0)?;
    let g = make_grid(&dom, &[512])?;
    let coeffs: Vec<(f64, f64, f64)> = (1..=3)
        .map(|m| {
            (
                rng.gen_range(0.2..1.0),
                m as f64 * rng.gen_range(0.8..1.4),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    // Random smooth profile left of 1, frozen constant on [1, 2]: the
    // perturbations below live only on the flat part, so the variation of
    // target + perturbation splits exactly.
    let target = GridFunction::sample(&g, |x| {
        let u = x[0].min(1.0);
        coeffs.iter().map(|&(a, fq, ph)| a * (fq * u + ph).sin()).sum()
    })?;
    let amp = rng.gen_range(0.1..0.5);
    let freq = rng.gen_range(5.0..20.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let window = |x: f64| {
        if x > 1.1 && x < 1.9 {
            (std::f64::consts::PI * (x - 1.1) / 0.8).sin().powi(2)
        } else {
            0.0
        }
    };
    let mut sequence = Vec::new();
    for k in 1..=32usize {
        let c = amp / k as f64;
        let pert =
            GridFunction::sample(&g, |x| c * window(x[0]) * (freq * x[0] + phase).sin())?;
        sequence.push(GridFunction::new(
            g.clone(),
            target
                .values()
                .iter()
                .zip(pert.values())
                .map(|(a, b)| a + b)
                .collect(),
        )?);
    }
    let w = if seed % 2 == 0 {
        Weight::constant(1.0)
    } else {
        step_weight()
    };
    Ok((sequence, target, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_stable_and_nonempty() {
        let a = catalog();
        let b = catalog();
        assert!(!a.is_empty());
        assert_eq!(
            a.iter().map(|f| f.name).collect::<Vec<_>>(),
            b.iter().map(|f| f.name).collect::<Vec<_>>()
        );
        assert!(a.iter().any(|f| f.name == "step-remark"));
        assert!(a.iter().any(|f| f.name == "slab"));
        assert!(a.iter().any(|f| f.name == "measure-dirac"));
    }

    #[test]
    fn gns_suite_shape() {
        let suite = gns_suite();
        assert_eq!(suite.len(), 10);
        assert_eq!(gns_holdout().len(), 5);
        // Deterministic ordering by name.
        let names: Vec<_> = suite.iter().map(|m| m.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn lsc_fixture_is_seed_deterministic() {
        let (s1, t1, _) = lsc_fixture(3).unwrap();
        let (s2, t2, _) = lsc_fixture(3).unwrap();
        assert_eq!(t1.values(), t2.values());
        assert_eq!(s1[5].values(), s2[5].values());
        let (_, t3, _) = lsc_fixture(4).unwrap();
        assert_ne!(t1.values(), t3.values());
    }
}
