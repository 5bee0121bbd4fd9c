mod common;

use common::*;
use enres_core::bruteforce::{min_energy_fixed_mean, oracle_malfunctioning_energy, DiscretizedProgram};
use enres_core::energy::{
    malfunctioning_optimal, nominal_energy, nominal_min_tf, nominal_optimal, zero_adversary_energy,
};
use enres_core::matkernel::{dot, norm2_sq, norm_inf, norms, pseudoinverse, symmetric_eigen, Matrix};
use enres_core::signals::{admissible, AdversaryCatalog, ControlSignal};
use enres_core::simkit::{direction_grid, simulate};
use enres_core::sysmodel::RegulationTask;
use enres_core::worstcase::{resilience_lower_bound, worst_case_bound, worst_case_energy_p1};
use proptest::prelude::*;
use rand::Rng;

fn matrix_strategy(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0..10.0f64, r * c).prop_map(move |d| Matrix::new(r, c, d).unwrap())
    })
}

fn symmetric_strategy(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(-10.0..10.0f64, n * n).prop_map(move |d| {
            let a = Matrix::new(n, n, d).unwrap();
            let sym: Vec<f64> = (0..n * n)
                .map(|k| 0.5 * (a.get(k / n, k % n) + a.get(k % n, k / n)))
                .collect();
            Matrix::new(n, n, sym).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn penrose_conditions(a in matrix_strategy(8)) {
        let x = pseudoinverse(&a);
        prop_assert_eq!((x.rows(), x.cols()), (a.cols(), a.rows()));
        for r in penrose_residuals(&a, &x) {
            prop_assert!(r <= 1e-9, "residual {r}");
        }
    }

    #[test]
    fn penrose_conditions_low_rank(seed in any::<u64>(), r in 1usize..=8, c in 1usize..=8, k in 1usize..=3) {
        let mut g = rng(seed);
        let a = gaussian_matrix(&mut g, r, k).matmul(&gaussian_matrix(&mut g, k, c));
        let x = pseudoinverse(&a);
        for res in penrose_residuals(&a, &x) {
            prop_assert!(res <= 1e-9, "residual {res}");
        }
    }

    #[test]
    fn eigenvector_norm_duality(s in symmetric_strategy(6)) {
        let e = symmetric_eigen(&s).unwrap();
        let v = norms(&e.eigenvectors);
        let vt = norms(&e.eigenvectors.transpose());
        prop_assert!((vt.inf - v.one).abs() <= 1e-12 * v.one);
        prop_assert!(e.reconstruct().sub(&s).frobenius_norm() <= 1e-9 * s.frobenius_norm().max(1.0));
    }

    #[test]
    fn rayleigh_inequality(s in symmetric_strategy(6), seed in any::<u64>()) {
        let e = symmetric_eigen(&s).unwrap();
        let x = gaussian_vec(&mut rng(seed), s.rows());
        let q = dot(&x, &s.mul_vec(&x));
        let xx = norm2_sq(&x);
        let slack = 1e-9 * s.frobenius_norm().max(1.0) * xx;
        prop_assert!(e.min() * xx <= q + slack);
        prop_assert!(q <= e.max() * xx + slack);
    }

    #[test]
    fn split_reassembles(seed in any::<u64>()) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 3);
        prop_assert_eq!(sys.reassemble(), sys.b().clone());
    }

    #[test]
    fn catalog_means_bounded(p in 1usize..=3, t_f in 0.1..50.0f64, seed in any::<u64>()) {
        let catalog = AdversaryCatalog { seed, ..Default::default() };
        for e in catalog.generate(p, t_f).unwrap() {
            prop_assert!(admissible(&e.signal));
            prop_assert!(norm_inf(&e.signal.stats().mean) <= 1.0 + 1e-12, "{}", e.label);
        }
    }

    #[test]
    fn constant_energy_exact(v in prop::collection::vec(-1.0..1.0f64, 1..5), t_f in 0.01..100.0f64) {
        let s = ControlSignal::constant(v.clone(), t_f).unwrap();
        prop_assert_eq!(s.stats().l2_energy, t_f * norm2_sq(&v));
    }

    #[test]
    fn sinusoid_quadrature_matches_closed_form(
        a in prop::collection::vec(-1.0..1.0f64, 1..4),
        omega in 0.01..20.0f64,
        phase in -3.2..3.2f64,
        t_f in 0.1..30.0f64,
    ) {
        let s = ControlSignal::sinusoid(a, omega, phase, t_f).unwrap();
        let exact = s.stats();
        let quad = s.stats_by_quadrature(1e-12);
        prop_assert!((quad.l2_energy - exact.l2_energy).abs() <= 1e-9 * exact.l2_energy.max(1e-300));
        for (q, e) in quad.mean.iter().zip(&exact.mean) {
            prop_assert!((q - e).abs() <= 1e-9 * e.abs().max(1e-6));
        }
    }

    #[test]
    fn regulation_identity(seed in any::<u64>(), t_f in 0.5..20.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let task = RegulationTask::new(x0.clone(), t_f).unwrap();
        let catalog = AdversaryCatalog { seed, ..Default::default() };
        for e in catalog.generate(sys.p(), t_f).unwrap() {
            let r = malfunctioning_optimal(&sys, &task, &e.signal).unwrap();
            let scale = norm2_sq(&x0).sqrt().max(1.0);
            prop_assert!(r.regulation_residual.unwrap() <= 1e-10 * scale, "{}", e.label);
            let tr = simulate(&sys, &task, r.malfunctioning_control.as_ref().unwrap(), Some(&e.signal), 8).unwrap();
            prop_assert!(tr.terminal_error <= 1e-9 * norm2_sq(&x0).sqrt());
        }
        let (u, _) = nominal_optimal(&sys, &RegulationTask::new(x0.clone(), t_f.max(nominal_min_tf(&sys, &x0).unwrap())).unwrap()).unwrap();
        let t_n = u.horizon();
        let tr = simulate(&sys, &RegulationTask::new(x0.clone(), t_n).unwrap(), &u, None, 8).unwrap();
        prop_assert!(tr.terminal_error <= 1e-9 * norm2_sq(&x0).sqrt());
    }

    #[test]
    fn zero_padding_dominance(seed in any::<u64>(), t_f in 0.1..20.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 3);
        let x0 = random_x0(&mut g, sys.n());
        let en = nominal_energy(&sys, &x0, t_f);
        let em = zero_adversary_energy(&sys, &x0, t_f);
        prop_assert!(en <= em * (1.0 + 1e-12));
    }

    #[test]
    fn nominal_admissible_iff_feasible(seed in any::<u64>(), factor in 0.2..3.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let min_tf = nominal_min_tf(&sys, &x0).unwrap();
        let task = RegulationTask::new(x0, min_tf * factor).unwrap();
        match nominal_optimal(&sys, &task) {
            Ok((u, _)) => {
                prop_assert!(factor >= 1.0);
                prop_assert!(admissible(&u));
            }
            Err(_) => prop_assert!(factor < 1.0),
        }
    }

    #[test]
    fn nominal_homogeneity(seed in any::<u64>(), t_f in 0.1..20.0f64, alpha in 0.05..20.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let e = nominal_energy(&sys, &x0, t_f);
        let ax: Vec<f64> = x0.iter().map(|v| alpha * v).collect();
        prop_assert!(rel_err(nominal_energy(&sys, &ax, t_f), alpha * alpha * e) <= 1e-10);
        prop_assert!(rel_err(nominal_energy(&sys, &x0, alpha * t_f), e / alpha) <= 1e-10);
    }

    #[test]
    fn p1_bound_collapses_to_exact(seed in any::<u64>(), t_f in 0.1..20.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 1);
        let x0 = random_x0(&mut g, sys.n());
        let r = worst_case_bound(&sys, &RegulationTask::new(x0, t_f).unwrap()).unwrap();
        prop_assert!(rel_err(r.bound, r.exact_p1.unwrap()) <= 1e-9);
    }

    #[test]
    fn p1_dominance_and_attainment(seed in any::<u64>(), t_f in 0.1..20.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 1);
        let x0 = random_x0(&mut g, sys.n());
        let task = RegulationTask::new(x0, t_f).unwrap();
        let r = worst_case_bound(&sys, &task).unwrap();
        let exact = r.exact_p1.unwrap();
        let catalog = AdversaryCatalog { seed, ..Default::default() };
        for e in catalog.generate(1, t_f).unwrap() {
            let total = malfunctioning_optimal(&sys, &task, &e.signal).unwrap().total_energy.unwrap();
            prop_assert!(total <= exact + 1e-9, "{}: {total} > {exact}", e.label);
        }
        let worst = r.worst_adversary_p1.unwrap();
        let attained = malfunctioning_optimal(&sys, &task, &worst).unwrap().total_energy.unwrap();
        prop_assert!((attained - exact).abs() <= 1e-10 * exact.max(1.0));
    }

    #[test]
    fn general_bound_dominates_adversaries(seed in any::<u64>(), t_f in 0.1..20.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let task = RegulationTask::new(x0, t_f).unwrap();
        let bound = worst_case_bound(&sys, &task).unwrap().bound;
        let catalog = AdversaryCatalog { seed, ..Default::default() };
        for e in catalog.generate(sys.p(), t_f).unwrap() {
            let total = malfunctioning_optimal(&sys, &task, &e.signal).unwrap().total_energy.unwrap();
            prop_assert!(total <= bound * (1.0 + 1e-12), "{}", e.label);
        }
    }

    #[test]
    fn resilience_bound_is_valid(seed in any::<u64>(), t_f in 0.1..20.0f64, radius in 0.1..50.0f64) {
        let mut g = rng(seed);
        let n = g.random_range(1..=3usize);
        let m = g.random_range(n..=5usize);
        let sys = random_system(&mut g, n, m, 1);
        let lb = resilience_lower_bound(&sys, t_f, radius).unwrap().lower_bound;
        for d in direction_grid(n, 64) {
            for s in [1.0, 1.5, 4.0] {
                let x0: Vec<f64> = d.iter().map(|v| v * radius * s).collect();
                let ratio = nominal_energy(&sys, &x0, t_f) / worst_case_energy_p1(&sys, &x0, t_f).unwrap();
                prop_assert!(ratio >= lb * (1.0 - 1e-12), "ratio {ratio} < bound {lb}");
            }
        }
    }

    #[test]
    fn resilience_bound_monotone_in_radius(seed in any::<u64>(), t_f in 0.1..20.0f64) {
        let mut g = rng(seed);
        let n = g.random_range(1..=3usize);
        let m = g.random_range(n..=5usize);
        let sys = random_system(&mut g, n, m, 1);
        let mut prev = 0.0;
        for k in 1..=40 {
            let r = resilience_lower_bound(&sys, t_f, 0.25 * k as f64).unwrap().lower_bound;
            prop_assert!(r >= prev * (1.0 - 1e-14));
            prev = r;
        }
    }

    #[test]
    fn fixed_mean_minimiser_is_constant(
        k in 1usize..40,
        z in prop::collection::vec(-3.0..3.0f64, 1..5),
        t_f in 0.01..50.0f64,
    ) {
        let sol = min_energy_fixed_mean(&DiscretizedProgram::new(k, t_f, z.clone()).unwrap());
        prop_assert!(sol.spread <= 1e-10);
        prop_assert!(rel_err(sol.energy, t_f * norm2_sq(&z)) <= 1e-10 || norm2_sq(&z) == 0.0);
    }

    #[test]
    fn oracle_constant_in_pieces(seed in any::<u64>(), t_f in 0.5..10.0f64) {
        let mut g = rng(seed);
        let sys = random_small_system(&mut g, 2);
        let x0 = random_x0(&mut g, sys.n());
        let task = RegulationTask::new(x0, t_f).unwrap();
        let catalog = AdversaryCatalog { seed, ..Default::default() };
        let adv = &catalog.generate(sys.p(), t_f).unwrap()[0].signal;
        let base = oracle_malfunctioning_energy(&sys, &task, adv, 1).unwrap().energy;
        let mut prev = base;
        for k in [2, 4, 7, 16] {
            let e = oracle_malfunctioning_energy(&sys, &task, adv, k).unwrap().energy;
            prop_assert!(e <= prev * (1.0 + 1e-10));
            prop_assert!(rel_err(e, base) <= 1e-10);
            prev = e;
        }
    }
}
