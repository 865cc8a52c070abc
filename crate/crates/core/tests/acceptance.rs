//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion does. Run with `--nocapture` to see the report.

mod common;

use std::cell::Cell;
use std::path::Path;

use common::{derivative, golden_section_min, max_abs_diff, runner, simpson, simpson_samples};
use proptest::prelude::*;
use vaxcontract::contract::{declining_price_path, fixed_price_path, mean_delivery_delay, profit};
use vaxcontract::policy::{
    benefit_cost_ratio, design_optimal_schedule, optimal_horizon, pandemic_cost, social_benefit,
    social_cost, unit_cost_fixed_t,
};
use vaxcontract::repro::{write_figure, Figure};
use vaxcontract::solver::{convergence_order, solve, solve_planner};
use vaxcontract::{CapacityPath, ContractSpec, GridSpec, PricingSchedule};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn nodes(path: &CapacityPath, grid: &GridSpec) -> Vec<f64> {
    grid.times().iter().map(|&t| path.value(t)).collect()
}

fn random_spec() -> impl Strategy<Value = (ContractSpec, usize)> {
    (0.2f64..5.0, 0.3f64..3.0, 0.1f64..5.0, 0.0f64..0.9, 0.0f64..60.0, 20usize..500).prop_map(
        |(z, t, a, frac, k, n)| {
            let spec = ContractSpec::new(z, t, a)
                .with_initial_capacity(frac * z / t)
                .with_social_cost_rate(k);
            (spec, n)
        },
    )
}

fn closed_form_path() -> Outcome {
    let spec = ContractSpec::new(1.0, 1.0, 1.0);
    let p = fixed_price_path(&spec).map_err(|e| e.to_string())?;
    let z_t = p.value(1.0);
    let delay = mean_delivery_delay(&p, 1.0);
    ensure(rel(z_t, 1.5) <= 1e-12, || format!("z(T) = {z_t}"))?;
    ensure(rel(delay, 0.625) <= 1e-12, || format!("delay = {delay}"))?;
    // Oracle: Simpson is exact for the cubic t z(t).
    let oracle = simpson(|t| t * (3.0 * t - 1.5 * t * t), 0.0, 1.0, 2);
    ensure(rel(delay, oracle) <= 1e-12, || format!("oracle delay = {oracle}"))?;
    Ok(format!("z(T) = {z_t}, delay = {delay}"))
}

fn analytic_numeric_equivalence() -> Outcome {
    let cases = [
        (ContractSpec::new(1.0, 1.0, 1.0), false),
        (ContractSpec::new(1.0, 1.0, 1.0).with_initial_capacity(0.4).with_social_cost_rate(3.0), false),
        (ContractSpec::new(1.0, 1.0, 1.0).with_social_cost_rate(48.0), true),
        (ContractSpec::new(1.0, 1.0, 1.0).with_social_cost_rate(10.0), true),
    ];
    let mut worst_dev = 0.0f64;
    let mut orders = Vec::new();
    for (spec, linear) in cases {
        let schedule = if linear {
            PricingSchedule::LinearDecline { base_price: 5.0, slope: spec.social_cost_rate }
        } else {
            PricingSchedule::Constant { base_price: 5.0 }
        };
        let path = if linear { declining_price_path(&spec) } else { fixed_price_path(&spec) }
            .map_err(|e| e.to_string())?;
        let grid = GridSpec::new(1000, spec.horizon).unwrap();
        let traj = solve(&spec, &schedule, &grid).map_err(|e| e.to_string())?;
        let dev = max_abs_diff(&traj.values, &nodes(&path, &grid));
        ensure(dev <= 5e-5, || format!("node deviation {dev:e} for {spec:?}"))?;
        worst_dev = worst_dev.max(dev);

        let grids: Vec<GridSpec> =
            [50, 100, 200, 400].iter().map(|&n| GridSpec::new(n, spec.horizon).unwrap()).collect();
        let report = convergence_order(&spec, &schedule, &grids).map_err(|e| e.to_string())?;
        ensure((1.8..=2.2).contains(&report.order), || {
            format!("order {} for {spec:?}", report.order)
        })?;
        orders.push(report.order);
    }
    let orders: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
    Ok(format!("max deviation {worst_dev:.2e}, orders [{}]", orders.join(", ")))
}

fn price_level_invariance() -> Outcome {
    let worst = Cell::new((0.0f64, 0.0f64));
    runner(100)
        .run(&(random_spec(), -50.0f64..50.0, 0.1f64..25.0), |((spec, n), p0, shift)| {
            let grid = GridSpec::new(n, spec.horizon).unwrap();
            let a = solve(&spec, &PricingSchedule::Constant { base_price: p0 }, &grid).unwrap();
            let b = solve(&spec, &PricingSchedule::Constant { base_price: p0 + shift }, &grid).unwrap();
            let node = max_abs_diff(&a.values, &b.values);
            let lambda = ((a.multiplier - b.multiplier).abs() - shift).abs()
                / a.multiplier.abs().max(b.multiplier.abs()).max(1.0);
            let (w0, w1) = worst.get();
            worst.set((w0.max(node), w1.max(lambda)));
            prop_assert!(node <= 1e-10, "node difference {:e}", node);
            prop_assert!(lambda <= 1e-10, "multiplier shift off by {:e}", lambda);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let (node, lambda) = worst.get();
    Ok(format!("100 specs, node diff <= {node:.1e}, multiplier shift error <= {lambda:.1e}"))
}

fn firm_planner_isomorphism() -> Outcome {
    let worst = Cell::new(0.0f64);
    runner(100)
        .run(&(random_spec(), -50.0f64..50.0), |((spec, n), p0)| {
            let grid = GridSpec::new(n, spec.horizon).unwrap();
            let schedule = PricingSchedule::LinearDecline { base_price: p0, slope: spec.social_cost_rate };
            let firm = solve(&spec, &schedule, &grid).unwrap();
            let planner = solve_planner(&spec, &grid).unwrap();
            let diff = max_abs_diff(&firm.values, &planner.values);
            worst.set(worst.get().max(diff));
            prop_assert!(diff <= 1e-10, "firm vs planner {:e}", diff);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("100 specs, max node difference {:.1e}", worst.get()))
}

fn scaling_laws() -> Outcome {
    let base = ContractSpec::new(1.0, 1.0, 1.0);
    let cost = |z: f64, t: f64| {
        unit_cost_fixed_t(&ContractSpec { total_quantity: z, horizon: t, ..base.clone() }).unwrap()
    };
    let mut report = Vec::new();
    for &(z, t) in &[(1.0, 1.0), (2.0, 3.0), (0.7, 0.4)] {
        let halved = cost(z, t / 2.0) / cost(z, t);
        let joint = cost(z / 2.0, t / 2.0) / cost(z, t);
        ensure(rel(halved, 8.0) <= 1e-12, || format!("T-halving ratio {halved}"))?;
        ensure(rel(joint, 4.0) <= 1e-12, || format!("joint halving ratio {joint}"))?;
        report.push(format!("{halved}/{joint}"));
    }
    Ok(format!("ratios {}", report.join(", ")))
}

fn optimal_horizon_check() -> Outcome {
    let mut worst = 0.0f64;
    for &(z, a, k) in &[(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (1.0, 3.0, 0.2), (5.0, 0.5, 40.0)] {
        let spec = ContractSpec::new(z, 1.0, a).with_social_cost_rate(k);
        let t_opt = optimal_horizon(&spec).map_err(|e| e.to_string())?;
        let at = |t: f64| social_cost(&ContractSpec { horizon: t, ..spec.clone() }).unwrap().social_cost;
        let t_min = golden_section_min(at, 1e-3, 100.0 * t_opt, 1e-12);
        ensure(rel(t_opt, t_min) <= 1e-6, || format!("closed {t_opt} vs search {t_min}"))?;
        ensure(rel(at(t_opt), 5.0 / 6.0 * k * t_opt) <= 1e-12, || {
            format!("cost {} vs 5kT/6 {}", at(t_opt), 5.0 / 6.0 * k * t_opt)
        })?;
        worst = worst.max(rel(t_opt, t_min));
    }
    let unit = optimal_horizon(&ContractSpec::new(1.0, 1.0, 1.0).with_social_cost_rate(1.0)).unwrap();
    // Independent value: (72/5)^(1/4) from the first-order condition.
    let expected = (72.0f64 / 5.0).sqrt().sqrt();
    ensure(rel(unit, expected) <= 1e-12, || format!("unit T_opt {unit}"))?;
    ensure((unit - 1.948_007_49).abs() < 1e-8, || format!("unit T_opt {unit}"))?;
    Ok(format!("unit T_opt = {unit:.9}, search agreement {worst:.1e}"))
}

fn benefit_ratio() -> Outcome {
    let direct = benefit_cost_ratio(5.0);
    ensure(direct == 20.0, || format!("ratio(5) = {direct}"))?;
    let spec = ContractSpec::new(1.0, 1.0, 1.0).with_social_cost_rate(1.0);
    let t_opt = optimal_horizon(&spec).unwrap();
    let report = social_benefit(&spec.with_natural_herd_immunity_time(5.0 * t_opt), None)
        .map_err(|e| e.to_string())?;
    ensure(rel(report.ratio, 20.0) <= 1e-12, || format!("report ratio {}", report.ratio))?;
    ensure(rel(report.benefit / report.cost, 20.0) <= 1e-12, || {
        format!("benefit/cost {}", report.benefit / report.cost)
    })?;
    Ok(format!("ratio = {direct}"))
}

fn declining_special_case() -> Outcome {
    for &(z, t) in &[(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
        let a = 1.0;
        let spec = ContractSpec::new(z, t, a).with_social_cost_rate(48.0 * a * z / t.powi(4));
        let p = declining_price_path(&spec).map_err(|e| e.to_string())?;
        let fixed = fixed_price_path(&spec).map_err(|e| e.to_string())?;
        ensure(rel(p.kappa, 4.0 * z / t.powi(4)) <= 1e-12, || format!("kappa {}", p.kappa))?;
        ensure(rel(p.gamma, 6.0 * z / t.powi(2)) <= 1e-12, || format!("gamma {}", p.gamma))?;
        ensure(rel(p.delta, -9.0 * z / t.powi(3)) <= 1e-12, || format!("delta {}", p.delta))?;
        ensure(rel(p.value(t), z / t) <= 1e-12, || format!("z(T) {}", p.value(t)))?;
        ensure(rel(p.rate(0.0), 2.0 * fixed.rate(0.0)) <= 1e-12, || {
            format!("initial speed {} vs {}", p.rate(0.0), fixed.rate(0.0))
        })?;
    }
    let spec = ContractSpec::new(1.0, 1.0, 1.0).with_social_cost_rate(48.0);
    let p = declining_price_path(&spec).unwrap();
    let w = pandemic_cost(&p, 1.0);
    let oracle = simpson(|t| t * (6.0 * t - 9.0 * t * t + 4.0 * t * t * t), 0.0, 1.0, 2000);
    ensure(rel(w, oracle) <= 1e-12, || format!("pandemic cost {w} vs quadrature {oracle}"))?;
    ensure(rel(w, 0.55) <= 1e-12, || format!("pandemic cost {w}"))?;
    ensure(derivative(|s| p.value(s), 1.0, 1e-5).abs() < 1e-8, || "terminal rate".into())?;
    Ok(format!("per-unit-time pandemic cost = {w}"))
}

fn break_even_schedule() -> Outcome {
    let worst = Cell::new(0.0f64);
    let strategy = (0.2f64..5.0, 0.3f64..3.0, 0.1f64..5.0, 0.0f64..60.0, 0.0f64..5.0);
    runner(100)
        .run(&strategy, |(z, t, a, k, c)| {
            let spec = ContractSpec::new(z, t, a).with_social_cost_rate(k).with_marginal_cost(c);
            let schedule = design_optimal_schedule(&spec).unwrap();
            let path = declining_price_path(&spec).unwrap();
            let at = profit(&path, &schedule, &spec);
            let above = profit(&path, &schedule.with_base_price(schedule.base_price() + 1e-3), &spec);
            worst.set(worst.get().max(at.abs()));
            prop_assert!(at.abs() <= 1e-10, "profit at p0* = {:e}", at);
            prop_assert!(above > 0.0, "profit above p0* = {:e}", above);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("100 specs, max |profit(p0*)| = {:.1e}", worst.get()))
}

fn reproduction_goldens() -> Outcome {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for figure in [Figure::Buildup, Figure::DecliningPrice] {
        let first = tempfile::tempdir().map_err(|e| e.to_string())?;
        let second = tempfile::tempdir().map_err(|e| e.to_string())?;
        let a = write_figure(figure, first.path(), None).map_err(|e| e.to_string())?;
        let b = write_figure(figure, second.path(), None).map_err(|e| e.to_string())?;
        for (pa, pb) in a.iter().zip(&b) {
            let name = pa.file_name().unwrap();
            let bytes_a = std::fs::read(pa).map_err(|e| e.to_string())?;
            let bytes_b = std::fs::read(pb).map_err(|e| e.to_string())?;
            let expected = std::fs::read(golden.join(name))
                .map_err(|e| format!("{}: {e}", name.to_string_lossy()))?;
            ensure(bytes_a == bytes_b, || format!("{} differs between runs", name.to_string_lossy()))?;
            ensure(bytes_a == expected, || format!("{} differs from golden", name.to_string_lossy()))?;
        }
    }

    let text = std::fs::read_to_string(golden.join("fig1.path.csv")).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    let t_end = rows.last().unwrap()[0];
    ensure(rows.len() % 2 == 1 && (t_end - 2.0).abs() < 1e-12, || "fig1 grid must span [0, 2]".into())?;
    let h = t_end / (rows.len() - 1) as f64;
    let z: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let average = simpson_samples(&z, h) / t_end;
    ensure((average - 1.25).abs() <= 1e-9, || format!("fig1 average {average}"))?;
    let numeric: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let numeric_average = simpson_samples(&numeric, h) / t_end;
    ensure((numeric_average - 1.25).abs() <= 1e-5, || format!("fig1 numeric average {numeric_average}"))?;
    Ok(format!("goldens byte-identical, fig1 average = {average}"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("closed-form path reproduction", closed_form_path),
        ("analytic-numerical equivalence", analytic_numeric_equivalence),
        ("price-level invariance", price_level_invariance),
        ("firm/planner isomorphism", firm_planner_isomorphism),
        ("scaling laws", scaling_laws),
        ("optimal horizon", optimal_horizon_check),
        ("benefit ratio", benefit_ratio),
        ("declining-price special case", declining_special_case),
        ("break-even schedule", break_even_schedule),
        ("reproduction goldens", reproduction_goldens),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
