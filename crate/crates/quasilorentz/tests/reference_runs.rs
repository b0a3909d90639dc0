//! Large-sample runs checked against closed-form approximations and
//! brute-force reimplementations.

use quasilorentz::batch::run_batch;
use quasilorentz::experiment::{fit_curve, run_field};
use quasilorentz_core::simulate::TrajectorySampler;
use quasilorentz_core::stats::{default_grid, survival_from_steps};
use quasilorentz_core::{ScattererField, SimConfig, StepHistogram, TailModel, TrajectoryOutcome};

const ALPHA: f64 = 1.3763819204711736;

fn poisson_run() -> (SimConfig, StepHistogram) {
    let cfg = SimConfig::new(1e-3, 1_000_000, 2024).unwrap();
    let field = ScattererField::poisson(ALPHA, 77, None).unwrap();
    (cfg, run_batch(&cfg, &field, None).unwrap())
}

#[test]
fn periodic_run_matches_brute_force_and_rarely_censors() {
    let s = 1.0 / ALPHA;
    let cfg = SimConfig::new(1e-3, 1000, 31).unwrap();
    let hist = run_batch(&cfg, &ScattererField::periodic(s).unwrap(), Some(2)).unwrap();

    let sampler = TrajectorySampler::new(&cfg);
    let brute = StepHistogram::from_outcomes(
        cfg.max_steps,
        (0..cfg.n_trajectories).map(|i| {
            let (q0, v) = sampler.params(i);
            for j in 1..=cfg.max_steps {
                let y = q0 + j as f64 * v;
                let d = (y - (y / s).round() * s).abs();
                if d <= 0.5 * cfg.epsilon + 4.0 * f64::EPSILON * y.abs() {
                    return TrajectoryOutcome::Hit(j);
                }
            }
            TrajectoryOutcome::Censored(cfg.max_steps)
        }),
    );
    assert_eq!(hist, brute);
    let frac = hist.censored() as f64 / hist.n() as f64;
    println!("periodic censored fraction {frac}");
    assert!(frac < 0.05, "{frac}");
}

#[test]
fn poisson_run_mean_and_rate_match_geometric_hitting() {
    let (cfg, hist) = poisson_run();
    let eps = cfg.epsilon;
    let hits = hist.n() - hist.censored();
    let mean = hist.hits().map(|(k, c)| k as f64 * c as f64).sum::<f64>() * eps / hits as f64;
    println!("poisson mean eps*k {mean}, 1/alpha {}", 1.0 / ALPHA);
    assert!((mean * ALPHA - 1.0).abs() <= 0.10, "{mean}");

    let grid = default_grid(cfg.censor_limit()).unwrap();
    let curve = survival_from_steps(&hist, eps, &grid, "poisson").unwrap();
    let fit = fit_curve(&curve, TailModel::Exponential, [0.5, 3.0]).unwrap();
    println!("poisson rate {} (alpha {ALPHA})", fit.param);
    assert!((fit.param / ALPHA - 1.0).abs() <= 0.15);
}

/// Binomial standard errors of a single realization ignore the fluctuation
/// of the realization itself (about 1% in point count over the sampled
/// window, i.e. several binomial standard errors at N = 10^6), so this
/// check depends on the field seed.
#[test]
#[ignore = "single-realization variance exceeds the binomial standard error at N = 10^6"]
fn poisson_run_survival_within_three_binomial_errors() {
    let (cfg, hist) = poisson_run();
    let ts = [0.5, 1.0, 2.0];
    let curve = survival_from_steps(&hist, cfg.epsilon, &ts, "poisson").unwrap();
    for (i, &t) in ts.iter().enumerate() {
        let expect = (-ALPHA * t).exp();
        let se = (expect * (1.0 - expect) / cfg.n_trajectories as f64).sqrt();
        let z = (curve.survival[i] - expect) / se;
        println!("poisson T={t} survival {} exp(-alpha T) {expect} z {z:.2}", curve.survival[i]);
        assert!(z.abs() <= 3.0, "T={t}: z = {z}");
    }
}

/// Averaging over independent realizations removes the realization bias;
/// the standard error comes from the spread between realizations.
#[test]
fn poisson_survival_is_exponential_across_realizations() {
    let realizations = 20u64;
    let ts = [0.5, 1.0, 2.0];
    let mut values = vec![Vec::new(); ts.len()];
    for r in 0..realizations {
        let cfg = SimConfig::new(1e-3, 50_000, 900 + r).unwrap();
        let field = ScattererField::poisson(ALPHA, 5000 + r, None).unwrap();
        let hist = run_batch(&cfg, &field, None).unwrap();
        let curve = survival_from_steps(&hist, cfg.epsilon, &ts, "poisson").unwrap();
        for (i, v) in curve.survival.iter().enumerate() {
            values[i].push(*v);
        }
    }
    let m = realizations as f64;
    for (i, &t) in ts.iter().enumerate() {
        let mean = values[i].iter().sum::<f64>() / m;
        let var = values[i].iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        let expect = (-ALPHA * t).exp();
        let z = (mean - expect) / se;
        println!("poisson T={t} mean survival {mean:.5} exp(-alpha T) {expect:.5} se {se:.2e} z {z:.2}");
        assert!(z.abs() <= 3.0, "T={t}: z = {z}");
    }
}

#[test]
fn simulate_summary_fits_power_law_for_fibonacci() {
    let cfg = SimConfig::new(1e-3, 200_000, 7).unwrap();
    let run = run_field(&cfg, &ScattererField::Fibonacci, None, None, None).unwrap();
    assert_eq!(run.curve.len(), 64);
    let fit = run.fit.unwrap();
    println!("fibonacci eps=1e-3 N=2e5 slope {}", fit.param);
    assert_eq!(fit.model, TailModel::PowerLaw);
    assert!((-1.35..=-0.75).contains(&fit.param));
}
