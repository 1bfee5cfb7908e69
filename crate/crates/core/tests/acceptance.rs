use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bosondist::distinguishability::{
    ds_closed_form, ds_exact, DistFunctionA, DistFunctionB, PurityMode,
};
use bosondist::interference::{
    prob_a_occupation, prob_b, prob_b_ideal, Experiment, Occupation, OutputTuple,
};
use bosondist::linalg::{
    beam_splitter_50_50, circulant_det, haar_unitary, permanent, permanent_naive, permanent_with,
    ComplexMatrix, PermanentMethod,
};
use bosondist::metrics::{required_purity, tvd_a, tvd_b};
use bosondist::oracle::{grid_purity, quad_j_integral, TimeGrid};
use bosondist::permgroup::iterate_group;
use bosondist::photon_model::{
    chi, purity_approx, purity_circulant, purity_order_n, time_density, GaussianModel, TimeTuple,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = std::result::Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn purity_sweep() -> Outcome {
    let mut report = Vec::new();
    for (eta, tol) in [(0.05, 5e-4), (0.1, 5e-3), (0.125, 2e-2)] {
        let mut worst = 0.0f64;
        for n in 2..=20 {
            let exact = purity_order_n(eta, n).map_err(err)?;
            let approx = purity_approx(eta, n);
            worst = worst.max((exact - approx).abs() / exact);
        }
        check(worst <= tol, || {
            format!("eta {eta}: max relative difference {worst:.3e} > {tol:e}")
        })?;
        report.push(format!("eta {eta}: {worst:.2e}"));
    }
    Ok(report.join(", "))
}

fn purity_requirement() -> Outcome {
    let p20 = required_purity(20, 0.1).map_err(err)?;
    let p50 = required_purity(50, 0.1).map_err(err)?;
    check((p20 - 0.989).abs() <= 1e-3, || {
        format!("N=20 gives {p20:.6}")
    })?;
    check((p50 - 0.996).abs() <= 1e-3, || {
        format!("N=50 gives {p50:.6}")
    })?;
    Ok(format!("N=20: {p20:.6}, N=50: {p50:.6}"))
}

fn purity_oracles() -> Outcome {
    let mut worst_grid = 0.0f64;
    let mut worst_det = 0.0f64;
    for eta in [0.05, 0.1, 0.2] {
        let model = GaussianModel::from_eta(1, eta).map_err(err)?;
        let grid = TimeGrid::default_for(&model);
        for n in 2..=5 {
            let exact = purity_order_n(eta, n).map_err(err)?;
            let on_grid = grid_purity(&model, n, &grid).map_err(err)?;
            let det = circulant_det(&purity_circulant(eta, n).map_err(err)?);
            worst_grid = worst_grid.max((exact - on_grid).abs());
            worst_det = worst_det.max((exact - det.sqrt().recip()).abs());
        }
    }
    check(worst_grid <= 1e-6, || {
        format!("grid difference {worst_grid:.3e}")
    })?;
    check(worst_det <= 1e-12, || {
        format!("determinant difference {worst_det:.3e}")
    })?;
    Ok(format!(
        "grid {worst_grid:.2e}, determinant {worst_det:.2e}"
    ))
}

fn closed_form_group_sum() -> Outcome {
    let mut worst = 0.0f64;
    for eta in [0.05, 0.1, 0.2, 0.5] {
        for n in 1..=8 {
            let model = GaussianModel::from_eta(n, eta).map_err(err)?;
            let brute = DistFunctionA::with_mode(&model, PurityMode::Approx)
                .group_average()
                .map_err(err)?;
            worst = worst.max((brute - ds_closed_form(n, eta)).abs());
        }
    }
    check(worst <= 1e-12, || format!("max difference {worst:.3e}"))?;
    Ok(format!("max difference {worst:.2e}"))
}

fn integral_identity() -> Outcome {
    let mut worst = 0.0f64;
    for eta in [0.05, 0.1, 0.2] {
        for n in 1..=3 {
            let model = GaussianModel::from_eta(n, eta).map_err(err)?;
            let df = DistFunctionA::new(&model);
            for sigma in iterate_group(n).map_err(err)? {
                let quad = quad_j_integral(&model, &sigma, 40).map_err(err)?;
                worst = worst.max((quad - df.j_a(&sigma).map_err(err)?).abs());
            }
        }
    }
    check(worst <= 1e-6, || format!("max difference {worst:.3e}"))?;
    Ok(format!("max difference {worst:.2e}"))
}

fn time_resolved_unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    let omega = [0.0, 0.4, -0.3];
    for seed in 0..5u64 {
        for n in 1..=3usize {
            let model = GaussianModel::new(1.0, 0.3, omega[..n].to_vec()).map_err(err)?;
            let spread = model.spread_variance().sqrt();
            for m in [n, 6] {
                let exp = Experiment::new(model.clone(), haar_unitary(m, seed).map_err(err)?)
                    .map_err(err)?;
                for _ in 0..50 {
                    let t: Vec<f64> = (0..n)
                        .map(|_| rng.random_range(-2.0..2.0) * spread)
                        .collect();
                    let t = TimeTuple::new(t).map_err(err)?;
                    let density = time_density(&model, &t).map_err(err)?;
                    let mut mixed = 0.0;
                    let mut ideal = 0.0;
                    for idx in 0..m.pow(n as u32) {
                        let l = OutputTuple::from_index(idx, n, m);
                        mixed += prob_b(&exp, &l, &t).map_err(err)?;
                        ideal += prob_b_ideal(&exp, &l, &t).map_err(err)?;
                    }
                    worst = worst
                        .max((mixed - density).abs())
                        .max((ideal - density).abs());
                    cases += 1;
                }
            }
        }
    }
    check(worst <= 1e-9, || format!("max difference {worst:.3e}"))?;
    Ok(format!("{cases} time tuples, max difference {worst:.2e}"))
}

fn monte_carlo_ds() -> Outcome {
    let mut report = Vec::new();
    for n in 2..=4 {
        for eta in [0.05, 0.1] {
            let model = GaussianModel::from_eta(n, eta).map_err(err)?;
            let exact = ds_exact(&DistFunctionA::new(&model)).map_err(err)?;
            let mc = DistFunctionB::new(&model)
                .ds_monte_carlo(17 + n as u64, 100_000)
                .map_err(err)?;
            let z = (mc.estimate - exact).abs() / mc.std_error;
            check(z <= 3.0, || {
                format!(
                    "N={n} eta={eta}: {:.6} vs {exact:.6}, {z:.2} std errors",
                    mc.estimate
                )
            })?;
            report.push(format!("{z:.2}"));
        }
    }
    Ok(format!("deviations in std errors: {}", report.join(" ")))
}

fn distance_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_a = f64::NEG_INFINITY;
    let mut worst_b = f64::NEG_INFINITY;
    for i in 0..20u64 {
        let n = 2 + (i % 3) as usize;
        let m = rng.random_range(n..=8);
        let eta = rng.random_range(0.01..=0.2);
        let model = GaussianModel::from_eta(n, eta).map_err(err)?;
        let exp = Experiment::new(model, haar_unitary(m, 100 + i).map_err(err)?).map_err(err)?;
        let gap = 1.0 - ds_exact(&DistFunctionA::new(exp.model())).map_err(err)?;
        let da = tvd_a(&exp).map_err(err)?;
        let db = tvd_b(&exp, i, 2000).map_err(err)?;
        check(da <= gap + 1e-9, || {
            format!("experiment {i}: unresolved distance {da:.6e} > {gap:.6e}")
        })?;
        check(db.estimate <= gap + 3.0 * db.std_error, || {
            format!(
                "experiment {i}: resolved distance {:.6e} > {gap:.6e}",
                db.estimate
            )
        })?;
        worst_a = worst_a.max(da - gap);
        worst_b = worst_b.max((db.estimate - gap) / db.std_error);
    }
    Ok(format!(
        "max unresolved margin {worst_a:.2e}, max resolved z {worst_b:.2}"
    ))
}

fn hom_chain() -> Outcome {
    let coincidence = Occupation::new(vec![1, 1]).map_err(err)?;
    let at_ratio = |ratio: f64| -> std::result::Result<(f64, f64), String> {
        let model = GaussianModel::uniform(2, 1.0, ratio).map_err(err)?;
        let eta = model.eta();
        let exp = Experiment::new(model, beam_splitter_50_50()).map_err(err)?;
        let p = prob_a_occupation(&exp, &coincidence).map_err(err)?;
        Ok((p, (1.0 - (1.0 + 4.0 * eta * eta).sqrt().recip()) / 2.0))
    };
    let (zero, _) = at_ratio(0.0)?;
    check(zero == 0.0, || {
        format!("coincidence at zero spread is {zero:e}")
    })?;
    let mut worst = 0.0f64;
    for i in 0..=100 {
        let (p, expected) = at_ratio(0.1 * i as f64)?;
        worst = worst.max((p - expected).abs());
    }
    let (far, expected) = at_ratio(100.0)?;
    worst = worst.max((far - expected).abs());
    check(worst <= 1e-12, || {
        format!("closed form difference {worst:.3e}")
    })?;
    check((far - 0.5).abs() <= 1e-4, || {
        format!(
            "coincidence at spread ratio 100 is {far:.6}, {:.2e} from 1/2",
            0.5 - far
        )
    })?;
    Ok(format!(
        "closed form difference {worst:.2e}, ratio 100 gives {far:.6}"
    ))
}

fn pure_state_permanent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let omega = [0.0, 0.9, -0.4, 0.25];
    let mut worst = 0.0f64;
    for n in 1..=4usize {
        for distinct in [false, true] {
            let freqs = if distinct {
                omega[..n].to_vec()
            } else {
                vec![0.0; n]
            };
            let model = GaussianModel::new(1.0, 0.0, freqs).map_err(err)?;
            let m = n + 2;
            let exp = Experiment::new(model.clone(), haar_unitary(m, n as u64 + 30).map_err(err)?)
                .map_err(err)?;
            for _ in 0..20 {
                let l = OutputTuple::from_index(rng.random_range(0..m.pow(n as u32)), n, m);
                let t: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let t = TimeTuple::new(t).map_err(err)?;
                let b = ComplexMatrix::from_fn(n, n, |j, k| {
                    exp.unitary().get(j, l.ports()[k]) * chi(&model, j, t.as_slice()[k]).unwrap()
                })
                .map_err(err)?;
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                let expected = permanent(&b).map_err(err)?.norm_sqr() / fact;
                worst = worst.max((prob_b(&exp, &l, &t).map_err(err)? - expected).abs());
            }
        }
    }
    check(worst <= 1e-12, || format!("max difference {worst:.3e}"))?;
    Ok(format!("max difference {worst:.2e}"))
}

fn permanent_kernels() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for i in 0..100usize {
        let n = 1 + i % 8;
        let data: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let a = ComplexMatrix::from_row_major(n, n, data).map_err(err)?;
        let naive = permanent_naive(&a).map_err(err)?;
        let glynn = permanent_with(&a, PermanentMethod::Glynn).map_err(err)?;
        let ryser = permanent_with(&a, PermanentMethod::Ryser).map_err(err)?;
        let rel = ((glynn - naive).norm().max((ryser - naive).norm())) / naive.norm();
        worst = worst.max(rel);
    }
    check(worst <= 1e-12, || {
        format!("max relative difference {worst:.3e}")
    })?;
    Ok(format!("max relative difference {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "purity sweep against exponential approximation",
            budget: Duration::from_secs(1),
            run: purity_sweep,
        },
        Criterion {
            id: 2,
            name: "required purity for N = 20 and 50",
            budget: Duration::from_secs(1),
            run: purity_requirement,
        },
        Criterion {
            id: 3,
            name: "purity against grid and circulant oracles",
            budget: Duration::from_secs(10),
            run: purity_oracles,
        },
        Criterion {
            id: 4,
            name: "closed-form d_s against group sum",
            budget: Duration::from_secs(30),
            run: closed_form_group_sum,
        },
        Criterion {
            id: 5,
            name: "distinguishability integral identity",
            budget: Duration::from_secs(10),
            run: integral_identity,
        },
        Criterion {
            id: 6,
            name: "time-resolved unitarity",
            budget: Duration::from_secs(30),
            run: time_resolved_unitarity,
        },
        Criterion {
            id: 7,
            name: "Monte Carlo d_s against exact",
            budget: Duration::from_secs(120),
            run: monte_carlo_ds,
        },
        Criterion {
            id: 8,
            name: "distances within deviation bound",
            budget: Duration::from_secs(300),
            run: distance_bound,
        },
        Criterion {
            id: 9,
            name: "Hong-Ou-Mandel coincidence chain",
            budget: Duration::from_secs(1),
            run: hom_chain,
        },
        Criterion {
            id: 10,
            name: "pure-state permanent limit",
            budget: Duration::from_secs(5),
            run: pure_state_permanent,
        },
        Criterion {
            id: 11,
            name: "permanent kernels agree",
            budget: Duration::from_secs(10),
            run: permanent_kernels,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!(
                "{detail}; exceeded budget of {:.0} s",
                c.budget.as_secs_f64()
            )),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {}: {detail} [{secs:.2} s]", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {}: {detail} [{secs:.2} s]", c.id, c.name);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
