use proptest::prelude::*;
use swarm_descent::solver::MoveStatus;
use swarm_descent::{init_swarm, make_benchmark, run, step, BenchmarkId, Mode, RandomSource, SolverConfig};

fn arb_config() -> impl Strategy<Value = SolverConfig> {
    (1usize..30, 1.0f64..8.0, 0.05f64..0.5, 0.3f64..0.95, prop::bool::ANY).prop_map(|(n, q, lambda, gamma, gd)| {
        SolverConfig {
            lambda,
            gamma,
            nmax: 40,
            ..SolverConfig::default().with_agents(n).with_q(q).with_mode(if gd { Mode::Sbgd } else { Mode::Sbrd })
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_step_conserves_mass_and_descends(
        config in arb_config(),
        id in prop::sample::select(BenchmarkId::ALL.to_vec()),
        dim in 2usize..7,
        seed in any::<u64>(),
    ) {
        let problem = make_benchmark(id, dim).unwrap();
        let mut rng = RandomSource::from_seed(seed);
        let mut swarm = init_swarm(&problem, &config, &mut rng).unwrap();
        let mut f_min = swarm.f_min();
        for _ in 0..15 {
            let active_before = swarm.n_active();
            let out = step(&mut swarm, &problem, &config, &mut rng).unwrap();
            prop_assert!((swarm.total_mass() - 1.0).abs() <= 1e-12);
            prop_assert!(swarm.n_active() >= 1 && swarm.n_active() <= active_before);
            prop_assert!(out.record.f_min <= f_min);
            f_min = out.record.f_min;
            for mv in &out.moves {
                if mv.status == MoveStatus::Moved {
                    let guard = mv.f_before - config.descent_factor() * config.lambda * mv.m_rel * mv.h * mv.grad_sq;
                    prop_assert!(mv.f_after <= guard);
                }
                if config.mode == Mode::Sbgd {
                    prop_assert_eq!(mv.r, 1.0);
                }
            }
        }
    }

    #[test]
    fn runs_respect_budget_and_report_the_trace_best(
        config in arb_config(),
        seed in any::<u64>(),
    ) {
        let problem = make_benchmark(BenchmarkId::Ackley, 3).unwrap();
        let res = run(&problem, &config, seed).unwrap();
        prop_assert!(res.iterations_used <= config.nmax);
        prop_assert_eq!(res.trace.len(), res.iterations_used + 1);
        prop_assert_eq!(res.best_value, res.trace.last().unwrap().f_min);
        prop_assert_eq!(problem.value(&res.best_position), res.best_value);
    }
}
