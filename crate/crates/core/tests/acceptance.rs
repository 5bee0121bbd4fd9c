//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use enres_core::bruteforce::{
    adversary_search, min_energy_fixed_mean, oracle_malfunctioning_energy, DiscretizedProgram, SearchOptions,
};
use enres_core::energy::{malfunctioning_optimal, nominal_energy, nominal_min_tf, nominal_optimal};
use enres_core::matkernel::{norm2, norm2_sq, pseudoinverse};
use enres_core::signals::AdversaryCatalog;
use enres_core::simkit::{linspace, simulate, sweep_ratios, DirectionPolicy};
use enres_core::sysmodel::{underwater_robot, RegulationTask};
use enres_core::worstcase::{resilience_lower_bound, worst_case_bound};
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn anchors() -> Outcome {
    let start = Instant::now();
    let sys = underwater_robot();
    let lb = resilience_lower_bound(&sys, 10.0, 10.0).unwrap().lower_bound;
    let sweep = sweep_ratios(
        &sys,
        10.0,
        &[10.0],
        &DirectionPolicy::default(),
        &AdversaryCatalog::default(),
    )
    .unwrap();
    let worst = sweep.worst_case_ratio.unwrap()[0];
    let elapsed = start.elapsed();
    let pass = (0.025..=0.035).contains(&lb) && (0.03..=0.07).contains(&worst) && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!("lower_bound = {lb:.5}, min-direction ratio = {worst:.5}, {elapsed:.2?}"),
    )
}

fn ordering() -> Outcome {
    let start = Instant::now();
    let grid = linspace(1.0, 100.0, 50);
    let res = sweep_ratios(
        &underwater_robot(),
        10.0,
        &grid,
        &DirectionPolicy::default(),
        &AdversaryCatalog::default(),
    )
    .unwrap();
    let bound = res.metric_bound.as_ref().unwrap();
    let worst = res.worst_case_ratio.as_ref().unwrap();
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..grid.len() {
        max_violation = max_violation.max(bound[i] - worst[i]);
        for a in &res.adversaries {
            max_violation = max_violation.max(worst[i] - a.ratios[i]);
        }
    }
    let elapsed = start.elapsed();
    let pass = res.ordering_holds() && max_violation <= 1e-9 && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "{} points x {} adversaries, max violation {max_violation:.3e}, {elapsed:.2?}",
            grid.len(),
            res.adversaries.len()
        ),
    )
}

fn fixed_mean() -> Outcome {
    let mut g = rng(3);
    let (mut spread, mut err) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let k = g.random_range(1..=64usize);
        let dim = g.random_range(1..=4usize);
        let z = gaussian_vec(&mut g, dim);
        let t_f = g.random_range(0.01..100.0);
        let sol = min_energy_fixed_mean(&DiscretizedProgram::new(k, t_f, z.clone()).unwrap());
        spread = spread.max(sol.spread);
        err = err.max(rel_err(sol.energy, t_f * norm2_sq(&z)));
    }
    outcome(
        spread <= 1e-10 && err <= 1e-10,
        format!("100 instances, max spread {spread:.2e}, max energy error {err:.2e}"),
    )
}

fn closed_form_vs_oracle() -> Outcome {
    let mut g = rng(4);
    let mut worst = 0.0f64;
    let mut count = 0;
    for s in 0..20 {
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let t_f = g.random_range(0.5..20.0);
        let task = RegulationTask::new(x0, t_f).unwrap();
        let catalog = AdversaryCatalog {
            seed: s,
            ..Default::default()
        };
        let all = catalog.generate(sys.p(), t_f).unwrap();
        let step = all.len() / 5;
        for e in all.iter().step_by(step.max(1)).take(5) {
            let closed = malfunctioning_optimal(&sys, &task, &e.signal)
                .unwrap()
                .malfunctioning_energy
                .unwrap();
            let oracle = oracle_malfunctioning_energy(&sys, &task, &e.signal, 8).unwrap().energy;
            worst = worst.max(rel_err(closed, oracle));
            count += 1;
        }
    }
    outcome(
        count == 100 && worst <= 1e-8,
        format!("{count} comparisons, max relative deviation {worst:.2e}"),
    )
}

fn collapse() -> Outcome {
    let mut g = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let sys = random_small_system(&mut g, 1);
        let x0 = random_x0(&mut g, sys.n());
        let t_f = g.random_range(0.1..20.0);
        let r = worst_case_bound(&sys, &RegulationTask::new(x0, t_f).unwrap()).unwrap();
        worst = worst.max(rel_err(r.bound, r.exact_p1.unwrap()));
    }
    outcome(worst <= 1e-9, format!("50 systems, max relative gap {worst:.2e}"))
}

fn attainment() -> Outcome {
    let mut g = rng(6);
    let (mut attain, mut excess, mut shortfall) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut instances = vec![(underwater_robot(), vec![10.0, 0.0], 10.0)];
    for _ in 0..20 {
        let sys = random_small_system(&mut g, 1);
        let x0 = random_x0(&mut g, sys.n());
        let t_f = g.random_range(0.5..10.0);
        instances.push((sys, x0, t_f));
    }
    let mut searched = 0;
    for (sys, x0, t_f) in &instances {
        let task = RegulationTask::new(x0.clone(), *t_f).unwrap();
        let r = worst_case_bound(sys, &task).unwrap();
        let exact = r.exact_p1.unwrap();
        let total = malfunctioning_optimal(sys, &task, r.worst_adversary_p1.as_ref().unwrap())
            .unwrap()
            .total_energy
            .unwrap();
        attain = attain.max(rel_err(total, exact));
        let found = adversary_search(
            sys,
            &task,
            &SearchOptions {
                budget: 500,
                ..Default::default()
            },
        )
        .unwrap();
        excess = excess.max(found.value - exact);
        if !r.degenerate {
            shortfall = shortfall.max((exact - found.value) / exact);
            searched += 1;
        }
    }
    let pass = attain <= 1e-10 && excess <= 1e-9 && shortfall <= 0.01;
    outcome(
        pass,
        format!(
            "{} instances: attainment gap {attain:.2e}, search excess {excess:.2e}, search shortfall {:.3}% over {searched} non-degenerate",
            instances.len(),
            100.0 * shortfall
        ),
    )
}

fn regulation() -> Outcome {
    let mut g = rng(7);
    let mut worst = 0.0f64;
    let mut runs = 0;
    let mut check = |err: f64, x0: &[f64]| {
        worst = worst.max(err / norm2(x0));
        runs += 1;
    };
    for s in 0..30 {
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let t_f = nominal_min_tf(&sys, &x0).unwrap() * g.random_range(1.0..5.0);
        let task = RegulationTask::new(x0.clone(), t_f).unwrap();
        let (u, _) = nominal_optimal(&sys, &task).unwrap();
        check(simulate(&sys, &task, &u, None, 16).unwrap().terminal_error, &x0);
        let catalog = AdversaryCatalog {
            seed: s,
            ..Default::default()
        };
        for e in catalog.generate(sys.p(), t_f).unwrap() {
            let r = malfunctioning_optimal(&sys, &task, &e.signal).unwrap();
            let tr = simulate(
                &sys,
                &task,
                r.malfunctioning_control.as_ref().unwrap(),
                Some(&e.signal),
                16,
            )
            .unwrap();
            check(tr.terminal_error, &x0);
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{runs} trajectories, max ‖x(t_f)‖/‖x0‖ = {worst:.2e}"),
    )
}

fn penrose() -> Outcome {
    let mut g = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let r = g.random_range(1..=8usize);
        let c = g.random_range(1..=8usize);
        let a = gaussian_matrix(&mut g, r, c);
        let x = pseudoinverse(&a);
        for res in penrose_residuals(&a, &x) {
            worst = worst.max(res);
        }
    }
    outcome(worst <= 1e-9, format!("1000 matrices, max residual {worst:.2e}"))
}

fn homogeneity() -> Outcome {
    let mut g = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let t_f = g.random_range(0.1..20.0);
        let alpha = g.random_range(0.05..20.0);
        let e = nominal_energy(&sys, &x0, t_f);
        let ax: Vec<f64> = x0.iter().map(|v| alpha * v).collect();
        worst = worst.max(rel_err(nominal_energy(&sys, &ax, t_f), alpha * alpha * e));
        worst = worst.max(rel_err(nominal_energy(&sys, &x0, alpha * t_f), e / alpha));
    }
    outcome(worst <= 1e-10, format!("200 instances, max relative error {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 robot anchors", anchors),
        ("2 sweep ordering", ordering),
        ("3 constant minimiser", fixed_mean),
        ("4 closed form vs oracle", closed_form_vs_oracle),
        ("5 single-actuator collapse", collapse),
        ("6 attainment and dominance", attainment),
        ("7 regulation", regulation),
        ("8 Penrose conditions", penrose),
        ("9 homogeneity", homogeneity),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
