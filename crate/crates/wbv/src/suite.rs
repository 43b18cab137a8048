//! The full experiment battery: twelve independent checks exercising every
//! module against frozen expected values. Shared by the CLI (`wbv suite`)
//! and the integration tests; criteria run concurrently, capped by the
//! `WBV_THREADS` environment variable.

use crate::analysis::{
    coarea_check, empirical_c1, gns_check, isometry_check, CoareaTarget, EmbedObject,
};
use crate::bv1d::{
    approximability_probe_1d, mollified_indicator_tv, perimeter_1d, variation_1d,
};
use crate::domain::{make_grid, BoxDomain, GridFunction};
use crate::error::Result;
use crate::fixtures;
use crate::mollify::{mollifier_weight_bound, smooth_approximate};
use crate::quad;
use crate::shape::ShapeSet;
use crate::variation::{
    dual_lower_bound, lsc_probe, weighted_perimeter, weighted_tv, TestField,
};
use crate::weight::{RadialProfile, Weight};
use crate::weights::{
    check_pointwise_a1, classify_mf, default_radii_schedule, estimate_a1_constant,
    maximal_function, probe_points, BallFamily, MaximalSource,
};
use crate::measure::Measure;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub details: String,
    pub runtime_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub results: Vec<CriterionResult>,
    pub passed: bool,
}

/// Thread cap: `WBV_THREADS` when set, otherwise the machine's parallelism.
pub fn thread_cap() -> usize {
    std::env::var("WBV_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}

type Check = fn() -> Result<(bool, String)>;

const CRITERIA: [(usize, &str, Check); 12] = [
    (1, "step-weight variation value", c01_step_remark),
    (2, "non-approximability average at the jump", c02_jump_average),
    (3, "smooth-approximation variation bracket", c03_approximation_bracket),
    (4, "gradient-quadrature identity in 2-D", c04_structure_identity),
    (5, "singular and slab perimeters", c05_perimeters),
    (6, "level-set integral identity", c06_coarea),
    (7, "subgraph lift isometry", c07_isometry),
    (8, "A1 constants and pointwise bounds", c08_a1_machinery),
    (9, "maximal-function measure classification", c09_measures),
    (10, "Sobolev/isoperimetric calibration", c10_gns),
    (11, "lower semicontinuity under L1 limits", c11_lsc),
    (12, "duality lower bounds", c12_duality),
];

/// Run all twelve criteria; results are ordered by id regardless of the
/// execution schedule.
pub fn run_suite() -> SuiteReport {
    let slots: Mutex<Vec<Option<CriterionResult>>> =
        Mutex::new(vec![None; CRITERIA.len()]);
    let next = AtomicUsize::new(0);
    let workers = thread_cap().min(CRITERIA.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= CRITERIA.len() {
                    break;
                }
                let (id, name, check) = CRITERIA[i];
                let start = Instant::now();
                let (passed, details) = match check() {
                    Ok(r) => r,
                    Err(e) => (false, format!("error: {e}")),
                };
                let result = CriterionResult {
                    id,
                    name: name.to_string(),
                    passed,
                    details,
                    runtime_ms: start.elapsed().as_millis(),
                };
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });
    let results: Vec<CriterionResult> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("criterion ran"))
        .collect();
    let passed = results.iter().all(|r| r.passed);
    SuiteReport { results, passed }
}

fn c01_step_remark() -> Result<(bool, String)> {
    let start = Instant::now();
    let (f, w) = fixtures::step_remark();
    let v = variation_1d(&f, &w, fixtures::STEP_INTERVAL)?;
    let exact = v == 3.0;
    let mut mollified_ok = true;
    let mut worst: f64 = 0.0;
    for k in [10.0f64, 100.0] {
        let m = mollified_indicator_tv(-1.0 / k, 1.0, &w, 1.0 / k)?;
        worst = worst.max((m - 3.0).abs());
        mollified_ok &= (m - 3.0).abs() <= 1e-6;
    }
    let fast = start.elapsed().as_secs_f64() < 1.0;
    Ok((
        exact && mollified_ok && fast,
        format!("variation {v}; max mollified deviation {worst:.2e}; {:.3}s", start.elapsed().as_secs_f64()),
    ))
}

fn c02_jump_average() -> Result<(bool, String)> {
    let (f, w) = fixtures::step_remark();
    let rep = approximability_probe_1d(&f, &w)?;
    let atom = rep
        .atoms
        .iter()
        .find(|a| a.location == 0.0)
        .expect("atom at the jump");
    let ok = !rep.approximable
        && !atom.lebesgue_point
        && (atom.limit_estimate - 0.5).abs() <= 1e-3;
    Ok((ok, format!("limiting average {:.6} (expected 0.5)", atom.limit_estimate)))
}

fn c03_approximation_bracket() -> Result<(bool, String)> {
    let start = Instant::now();
    let f = fixtures::indicator_grid(4096);
    let (_, step_diag) = smooth_approximate(&f, &fixtures::step_weight(), 2e-2, 3)?;
    let ratio_step = step_diag.tv_ratio;
    let bracket_ok = ratio_step >= 1.0 - 1e-2 && ratio_step <= 2.0 + 1e-2;
    let wq = Weight::radial(RadialProfile::Quadratic { a: 1.0, b: 2.0 });
    let mut ratio_cont = f64::NAN;
    for eps in [4e-2, 2e-2] {
        let (_, diag) = smooth_approximate(&f, &wq, eps, 3)?;
        ratio_cont = diag.tv_ratio;
    }
    let cont_ok = (ratio_cont - 1.0).abs() <= 2e-2;
    let elapsed = start.elapsed().as_secs_f64();
    Ok((
        bracket_ok && cont_ok && elapsed < 30.0,
        format!("step ratio {ratio_step:.4} in [0.99, 2.01]; continuous ratio {ratio_cont:.4}; {elapsed:.1}s"),
    ))
}

fn c04_structure_identity() -> Result<(bool, String)> {
    struct Fixture {
        f: fn(&[f64]) -> f64,
        grad: fn(&[f64]) -> f64,
        w: Weight,
    }
    let fixtures: Vec<Fixture> = vec![
        Fixture {
            f: |x| (-(x[0] * x[0] + x[1] * x[1])).exp(),
            grad: |x| {
                let r2 = x[0] * x[0] + x[1] * x[1];
                2.0 * r2.sqrt() * (-r2).exp()
            },
            w: Weight::constant(1.0),
        },
        Fixture {
            f: |x| (-(x[0] * x[0] + x[1] * x[1])).exp(),
            grad: |x| {
                let r2 = x[0] * x[0] + x[1] * x[1];
                2.0 * r2.sqrt() * (-r2).exp()
            },
            w: Weight::radial(RadialProfile::ShiftedPower { alpha: -0.5 }),
        },
        Fixture {
            f: |x| {
                let (u, v) = (x[0] - 0.3, x[1] + 0.2);
                (-(u * u + v * v)).exp()
            },
            grad: |x| {
                let (u, v) = (x[0] - 0.3, x[1] + 0.2);
                let r2 = u * u + v * v;
                2.0 * r2.sqrt() * (-r2).exp()
            },
            w: Weight::constant(1.0),
        },
        Fixture {
            f: |x| x[0].cos() * x[1].sin(),
            grad: |x| {
                let a = x[0].sin() * x[1].sin();
                let b = x[0].cos() * x[1].cos();
                (a * a + b * b).sqrt()
            },
            w: Weight::constant(1.0),
        },
        Fixture {
            f: |x| (-2.0 * x[0] * x[0] - x[1] * x[1]).exp(),
            grad: |x| {
                let f = (-2.0 * x[0] * x[0] - x[1] * x[1]).exp();
                f * (16.0 * x[0] * x[0] + 4.0 * x[1] * x[1]).sqrt()
            },
            w: Weight::radial(RadialProfile::Quadratic { a: 0.25, b: 1.0 }),
        },
    ];
    let dom = fixtures_box();
    let mut all_ok = true;
    let mut lines = Vec::new();
    for (i, fx) in fixtures.iter().enumerate() {
        // Independent reference: nested adaptive quadrature of |grad f| w.
        let w = fx.w.clone();
        let grad = fx.grad;
        let reference = quad::integrate(
            |x| {
                quad::integrate(|y| grad(&[x, y]) * w.eval(&[x, y]), -2.0, 2.0, 1e-9)
                    .unwrap_or(f64::NAN)
            },
            -2.0,
            2.0,
            1e-9,
        )?;
        let mut errs = Vec::new();
        for res in [64usize, 128, 256] {
            let g = make_grid(&dom, &[res, res])?;
            let fg = GridFunction::sample(&g, |x| (fx.f)(x))?;
            let tv = weighted_tv(&fg, &fx.w)?.value;
            errs.push((tv - reference).abs() / reference);
        }
        let order = (errs[1] / errs[2]).log2();
        let ok = order >= 0.9 && errs[2] <= 0.02;
        all_ok &= ok;
        lines.push(format!("f{i}: order {order:.2}, final err {:.2e}", errs[2]));
    }
    Ok((all_ok, lines.join("; ")))
}

fn fixtures_box() -> BoxDomain {
    BoxDomain::rect([-2.0, -2.0], [2.0, 2.0]).expect("box")
}

fn c05_perimeters() -> Result<(bool, String)> {
    let p_inf = perimeter_1d(&[(0.0, 1.0)], &fixtures::power_weight())?;
    let p_two = perimeter_1d(&[(0.0, 1.0)], &Weight::constant(1.0))?;
    let mut weighted = Vec::new();
    let mut unweighted = Vec::new();
    for l in [1024.0f64, 2048.0, 4096.0] {
        let (slab, w, dom) = fixtures::slab(l);
        weighted.push(weighted_perimeter(&slab, &w, &dom)?.value);
        unweighted.push(weighted_perimeter(&slab, &Weight::constant(1.0), &dom)?.value);
    }
    let rel1 = (weighted[1] - weighted[0]).abs() / weighted[0];
    let rel2 = (weighted[2] - weighted[1]).abs() / weighted[1];
    let growth1 = unweighted[1] / unweighted[0];
    let growth2 = unweighted[2] / unweighted[1];
    let ok = p_inf.is_infinite()
        && p_two == 2.0
        && rel1 < 0.01
        && rel2 < 0.01
        && growth1 >= 1.9
        && growth2 >= 1.9;
    Ok((
        ok,
        format!(
            "singular perimeter {p_inf}; unit perimeter {p_two}; weighted slab changes {rel1:.4}/{rel2:.4}; unweighted growth {growth1:.2}x/{growth2:.2}x"
        ),
    ))
}

fn c06_coarea() -> Result<(bool, String)> {
    let tent = fixtures::tent();
    let w = fixtures::tent_weight();
    let coarse = coarea_check(CoareaTarget::Piecewise(&tent, (-2.0, 2.0)), &w, 200)?;
    let fine = coarea_check(CoareaTarget::Piecewise(&tent, (-2.0, 2.0)), &w, 800)?;
    let g200 = coarse.relative_gap.unwrap_or(f64::INFINITY);
    let g800 = fine.relative_gap.unwrap_or(f64::INFINITY);
    let value_ok = (coarse.direct_value - 3.0).abs() < 1e-9;
    Ok((
        value_ok && g200 <= 0.01 && g800 <= 0.002,
        format!("direct value {:.9}; gaps {g200:.2e} (200 levels), {g800:.2e} (800 levels)", coarse.direct_value),
    ))
}

fn c07_isometry() -> Result<(bool, String)> {
    let interval = ShapeSet::interval(0.0, 1.0)?;
    let dom = BoxDomain::interval(-2.0, 2.0)?;
    let step = isometry_check(EmbedObject::Set(&interval), &fixtures::step_weight(), &dom, 256)?;
    let step_ok = step.weighted_value == 3.0
        && step.lifted_value == 3.0
        && step.perimeter_gap == 0.0;
    let unit = isometry_check(EmbedObject::Set(&interval), &Weight::constant(1.0), &dom, 256)?;
    let cont_dom = BoxDomain::interval(-1.0, 2.0)?;
    let cont = isometry_check(
        EmbedObject::Set(&interval),
        &Weight::affine_1d(1.0, 2.0),
        &cont_dom,
        256,
    )?;
    let cont_ok = cont.perimeter_gap <= 0.02;
    let l1_ok = step.l1_gap < 1e-6 && unit.l1_gap < 1e-6 && cont.l1_gap < 1e-6;
    Ok((
        step_ok && cont_ok && l1_ok,
        format!(
            "step {}={} (gap {}); continuous gap {:.2e}; L1 gaps {:.1e}/{:.1e}/{:.1e}",
            step.weighted_value,
            step.lifted_value,
            step.perimeter_gap,
            cont.perimeter_gap,
            step.l1_gap,
            unit.l1_gap,
            cont.l1_gap
        ),
    ))
}

fn c08_a1_machinery() -> Result<(bool, String)> {
    let dom = BoxDomain::interval(-2.0, 2.0)?;
    let g = make_grid(&dom, &[2048])?;
    let power = fixtures::power_weight();
    let step = fixtures::step_weight();
    let fam_power = BallFamily::adapted(&g, &power);
    let fam_step = BallFamily::rich(&g);
    let est_power = estimate_a1_constant(&power, &g, &fam_power)?;
    let est_step = estimate_a1_constant(&step, &g, &fam_step)?;
    let estimates_ok =
        (est_power - 2.0).abs() <= 0.02 && (est_step - 2.0).abs() <= 0.02;

    let pw_power = check_pointwise_a1(&power, &g, &fam_power)?;
    let pw_step = check_pointwise_a1(&step, &g, &fam_step)?;
    let pointwise_ok = pw_power.max_ratio <= 1.0 + 1e-9 && pw_step.max_ratio <= 1.0 + 1e-9;

    let gm = make_grid(&dom, &[512])?;
    let mb_power = mollifier_weight_bound(&power, 0.05, &gm)?;
    let mb_step = mollifier_weight_bound(&step, 0.05, &gm)?;
    let mollifier_ok = mb_power.max_ratio <= 1.0 + 1e-8 && mb_step.max_ratio <= 1.0 + 1e-8;

    let target = 2.0f64.sqrt() + 1e-3;
    let half_power = estimate_a1_constant(
        &power.pow_delta(0.5)?,
        &g,
        &BallFamily::adapted(&g, &power),
    )?;
    let half_step = estimate_a1_constant(&step.pow_delta(0.5)?, &g, &fam_step)?;
    let half_ok = half_power <= target && half_step <= target;
    Ok((
        estimates_ok && pointwise_ok && mollifier_ok && half_ok,
        format!(
            "estimates {est_power:.4}/{est_step:.4}; pointwise ratios {:.4}/{:.4}; mollifier ratios {:.4}/{:.4}; half-power estimates {half_power:.4}/{half_step:.4} vs {:.4}",
            pw_power.max_ratio, pw_step.max_ratio, mb_power.max_ratio, mb_step.max_ratio, 2.0f64.sqrt()
        ),
    ))
}

fn c09_measures() -> Result<(bool, String)> {
    let dom = BoxDomain::interval(-2.0, 2.0)?;
    let g = make_grid(&dom, &[256])?;
    let probes = probe_points(&g);
    let radii = default_radii_schedule(&g);
    let leb = classify_mf(&Measure::lebesgue(1), &probes, &radii)?;
    let dir = classify_mf(&Measure::dirac(vec![0.0]), &probes, &radii)?;
    let dy = classify_mf(&Measure::dyadic_atoms_1d(), &probes, &radii)?;
    let classify_ok = leb.member
        && leb.agreement
        && (leb.k_estimate - 1.0).abs() <= 1e-3
        && leb.probes.len() >= 5
        && dir.member
        && dir.agreement
        && dir.k_estimate.abs() <= 1e-3
        && !dy.member
        && dy.agreement;
    let k_uniform = leb
        .per_probe_limsup
        .iter()
        .all(|k| (k - 1.0).abs() <= 1e-3);

    // M(dirac at 0)(x) = 1/|x| at the probe points.
    let gf = make_grid(&dom, &[4096])?;
    let fam = BallFamily::rich(&gf);
    let m = maximal_function(MaximalSource::Measure(&Measure::dirac(vec![0.0])), &gf, &fam)?;
    let mut maximal_ok = true;
    let mut worst: f64 = 0.0;
    for p in &probes {
        let x = p[0];
        let idx = gf
            .centers()
            .enumerate()
            .min_by(|a, b| {
                (a.1[0] - x).abs().partial_cmp(&(b.1[0] - x).abs()).unwrap()
            })
            .unwrap()
            .0;
        let center = gf.center_of_flat(idx)[0];
        let expected = 1.0 / center.abs();
        let rel = (m.values()[idx] - expected).abs() / expected;
        worst = worst.max(rel);
        maximal_ok &= rel <= 0.01;
    }
    Ok((
        classify_ok && k_uniform && maximal_ok,
        format!(
            "limit ratios: Lebesgue {:.5}, point mass {:.2e}, doubling atoms divergent; worst maximal deviation {worst:.2e}",
            leb.k_estimate, dir.k_estimate
        ),
    ))
}

fn c10_gns() -> Result<(bool, String)> {
    let suite = fixtures::gns_suite();
    let c1 = empirical_c1(&suite)?;
    let mut min_residual = f64::INFINITY;
    let mut disk_ratio = f64::NAN;
    let mut improved_ok = false;
    for m in suite.iter().chain(fixtures::gns_holdout().iter()) {
        let rep = gns_check(&m.input, &m.weight, c1, m.approximable)?;
        min_residual = min_residual.min(rep.residual);
        if m.name == "disk-unit" {
            disk_ratio = rep.lhs / rep.rhs;
        }
        if m.name == "disk-radial" {
            improved_ok = (rep.a1_power - 1.0 / rep.one_star).abs() < 1e-12
                && rep.residual >= 0.0;
        }
    }
    let expected = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
    let disk_ok = (disk_ratio - expected).abs() <= 0.02 * expected;
    Ok((
        min_residual >= -1e-9 && disk_ok && improved_ok,
        format!(
            "calibrated constant {c1:.5}; min residual {min_residual:.2e}; disk ratio {disk_ratio:.5} vs {expected:.5}"
        ),
    ))
}

fn c11_lsc() -> Result<(bool, String)> {
    let mut min_gap = f64::INFINITY;
    for seed in 0..20u64 {
        let (sequence, target, w) = fixtures::lsc_fixture(seed)?;
        let rep = lsc_probe(&sequence, &target, &w)?;
        min_gap = min_gap.min(rep.gap);
    }
    Ok((
        min_gap >= -1e-9,
        format!("minimum liminf gap over 20 sequences: {min_gap:.3e}"),
    ))
}

fn c12_duality() -> Result<(bool, String)> {
    let f = fixtures::indicator_grid(256);
    let g = f.grid().clone();
    let mut worst_excess = f64::NEG_INFINITY;
    for (seed, w) in [(11u64, Weight::constant(1.0)), (12, fixtures::step_weight())] {
        let tv = weighted_tv(&f, &w)?.value;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let phi = TestField::random_feasible(&g, &w, &mut rng)?;
            let dual = dual_lower_bound(&f, &w, &phi)?;
            worst_excess = worst_excess.max((dual - tv) / tv);
        }
    }
    let bound_ok = worst_excess <= 1e-12;
    // Hand-built field attaining the unweighted perimeter 2.
    let w1 = Weight::constant(1.0);
    let phi = TestField::sample(&g, |_, x| {
        if x[0] <= 0.0 {
            (1.0 + x[0]).max(0.0) * -1.0
        } else if x[0] <= 1.0 {
            2.0 * x[0] - 1.0
        } else {
            (2.0 - x[0]).max(0.0)
        }
    })?
    .clipped(&w1);
    let attained = dual_lower_bound(&f, &w1, &phi)?;
    let attain_ok = (attained - 2.0).abs() <= 1e-9;
    Ok((
        bound_ok && attain_ok,
        format!("max relative excess {worst_excess:.2e}; optimizing field value {attained:.12}"),
    ))
}
