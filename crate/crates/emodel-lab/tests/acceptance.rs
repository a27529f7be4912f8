//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use emodel_lab::algebra::{CMat, C64};
use emodel_lab::cli::{self, Command, ExperimentConfig, ModelKind};
use emodel_lab::doubles::TStarPoint;
use emodel_lab::dynamics::{
    current_of, e_axioms, integrate, BiYbModel, EModel, IntegrationOptions, TStarModel,
};
use emodel_lab::integrability::{
    lax_observables, lax_residual, rmatrix_identity, verify_conditions, BiYbSpectral, Condition, PcmSpectral,
    SpectralData,
};
use emodel_lab::models::reduction::{random_chart, reduction_suite};
use emodel_lab::models::{su3, biyb, block_xi, cpn, pendulum, regular_xi, SuiteReport};
use emodel_lab::random::{complex_gaussian, rng_from_seed, su_element};

type Outcome = emodel_lab::Result<(bool, String)>;

fn worst(reports: &[SuiteReport], name: &str) -> f64 {
    reports
        .iter()
        .filter_map(|r| r.get(name))
        .map(|c| c.residual)
        .fold(0.0, f64::max)
}

fn noted(reports: &[SuiteReport], name: &str) -> f64 {
    reports
        .iter()
        .filter_map(|r| r.notes.get(name).copied())
        .fold(0.0, f64::max)
}

fn e_operator_axioms() -> Outcome {
    let (mut inv, mut sym, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut take = |ax: emodel_lab::dynamics::EAxioms| {
        inv = inv.max(ax.involution);
        sym = sym.max(ax.symmetry);
        min_eig = min_eig.min(ax.min_gram_eigenvalue);
    };
    for n in 2..=6 {
        take(e_axioms(&TStarModel::new(block_xi(n))?));
    }
    for n in 2..=4 {
        for eta in [0.3, 1.0, 2.0] {
            for mu in [0.0, 0.3, 1.0, 2.0] {
                take(e_axioms(&BiYbModel::new(regular_xi(n), eta, mu)?));
            }
        }
    }
    let pass = inv <= 1e-10 && sym <= 1e-10 && min_eig > 0.0;
    Ok((pass, format!("E²-Id {inv:.1e}, asymmetry {sym:.1e}, min (x,Ex) eigenvalue {min_eig:.2e}")))
}

fn named_conditions<S: SpectralData>(sd: &S, seed: u64) -> emodel_lab::Result<f64> {
    Ok(verify_conditions(sd, 200, seed, 1e-10)?
        .into_iter()
        .filter(|r| r.condition != Condition::Adjointness)
        .map(|r| r.max_residual)
        .fold(0.0, f64::max))
}

fn sufficient_conditions() -> Outcome {
    let mut max = 0.0f64;
    let mut control = f64::INFINITY;
    for n in [2, 3] {
        max = max.max(named_conditions(&PcmSpectral::new(TStarModel::new(block_xi(n))?), 11)?);
        for (eta, mu) in [(0.7, 0.3), (1.5, 1.0)] {
            let model = BiYbModel::new(regular_xi(n), eta, mu)?;
            max = max.max(named_conditions(&BiYbSpectral::new(model.clone()), 12)?);
            control = control.min(named_conditions(&BiYbSpectral::negative_control(model), 12)?);
        }
    }
    let pass = max <= 1e-10 && control > 1e-3;
    Ok((pass, format!("max residual {max:.1e}, weakest negative control {control:.2e}")))
}

fn identity_draws<S: SpectralData>(sd: &S, seed: u64) -> emodel_lab::Result<f64> {
    let m = sd.model();
    let n = m.n();
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 200 {
        let lambda = complex_gaussian(&mut rng) * 0.5;
        let rho = complex_gaussian(&mut rng) * 0.5;
        let j = current_of(m, &m.random_point(0.5, &mut rng));
        let x = su_element(n, &mut rng);
        let y = su_element(n, &mut rng);
        let away = |z: C64| (C64::new(1.0, 0.0) - z * z).norm() > 0.1;
        if !(away(lambda) && away(rho)) || (lambda - rho).norm() < 0.05 {
            continue;
        }
        let (lhs, rhs) = rmatrix_identity(sd, &j, &x, &y, lambda, rho)?;
        worst = worst.max((lhs - rhs).norm());
        done += 1;
    }
    Ok(worst)
}

fn rmatrix_relation() -> Outcome {
    let mut parts = Vec::new();
    let mut max = 0.0f64;
    for n in [2, 3] {
        let r = identity_draws(&PcmSpectral::new(TStarModel::new(block_xi(n))?), 21)?;
        parts.push(format!("pcm{n} {r:.1e}"));
        max = max.max(r);
        let r = identity_draws(&BiYbSpectral::new(BiYbModel::new(regular_xi(n), 0.7, 0.3)?), 22)?;
        parts.push(format!("biyb{n} {r:.1e}"));
        max = max.max(r);
    }
    Ok((max <= 1e-10, format!("|lhs-rhs| {}", parts.join(", "))))
}

fn isospectral_run<S: SpectralData>(sd: &S, l0: &<S::Model as EModel>::Point) -> emodel_lab::Result<(f64, f64, f64)> {
    let lambdas = [C64::new(0.3, 0.0), C64::new(0.5, 0.2), C64::new(-0.4, 0.1)];
    let obs = lax_observables(sd, &lambdas, &[2, 3])?;
    let traj = integrate(sd.model(), l0, &IntegrationOptions::rk4(10.0, 1e-3), &obs)?;
    let obs_drift = traj.observable_drifts().into_iter().fold(0.0, f64::max);
    let mut lax = 0.0f64;
    for &l in &lambdas {
        lax = lax.max(lax_residual(sd, &traj, l)?.residual);
    }
    Ok((traj.energy_drift(), obs_drift, lax))
}

fn isospectral_conservation() -> Outcome {
    let mut rng = rng_from_seed(31);
    let s = pendulum::random_state(&mut rng);
    let pend = isospectral_run(&PcmSpectral::new(pendulum::model()), &pendulum::state(s.x, s.v)?)?;
    let (chi, w) = random_chart(2, 0.5, &mut rng);
    let l0: TStarPoint = cpn::tstar_point(&chi, &(&w * C64::new(0.3, 0.0)))?;
    let cp2 = isospectral_run(&PcmSpectral::new(cpn::model(2)), &l0)?;
    let model = BiYbModel::new(regular_xi(2), 0.7, 0.3)?;
    let l0 = model.random_point(0.3, &mut rng);
    let bi = isospectral_run(&BiYbSpectral::new(model), &l0)?;
    let runs = [("pendulum", pend), ("cp2", cp2), ("biyb-su2", bi)];
    let pass = runs.iter().all(|(_, (h, o, l))| *h <= 1e-8 && *o <= 1e-8 && *l <= 1e-6);
    let detail = runs
        .iter()
        .map(|(name, (h, o, l))| format!("{name} H {h:.1e} trL^k {o:.1e} lax {l:.1e}"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((pass, detail))
}

fn pendulum_equivalence() -> Outcome {
    let m = pendulum::model();
    let opts = IntegrationOptions::rk4(5.0, 1e-3);
    let mut worst: f64 = 0.0;
    let mut rng = rng_from_seed(41);
    for _ in 0..5 {
        let s = pendulum::random_state(&mut rng);
        let traj = integrate(&m, &pendulum::state(s.x, s.v)?, &opts, &emodel_lab::dynamics::Observables::none())?;
        let oracle = common::spherical_pendulum(s.x, s.v, 4.0, 5.0, 1e-3);
        for (l, y) in traj.points.iter().zip(&oracle) {
            let x = pendulum::sphere_point(&l.k)?;
            for i in 0..3 {
                worst = worst.max((x[i] - y[i]).abs());
            }
        }
    }
    Ok((worst <= 1e-6, format!("max |x - x_oracle| {worst:.1e} over t = 5, 5 initial states")))
}

fn cpn_identities() -> Outcome {
    let mut rng = rng_from_seed(51);
    let mut killing: f64 = 0.0;
    let mut suites = Vec::new();
    for n in 1..=4 {
        let zeta = cpn::zeta(n);
        for _ in 0..50 {
            let r = 0.05 + 0.9 * rand::Rng::gen::<f64>(&mut rng);
            let (chi, _) = random_chart(n, r, &mut rng);
            let k = cpn::chart_embed(&chi)?;
            let x: CMat = k.adjoint() * &zeta * &k - &zeta;
            let n1 = n as f64 + 1.0;
            killing = killing.max(((&x * &x).trace().re + 2.0 * n1 * n1 * chi.norm_squared()).abs());
        }
        suites.push(cpn::cpn_suite(n, 50, 52)?);
    }
    let chart = worst(&suites, "chart-vs-global");
    let ham = worst(&suites, "hamiltonian-w-vs-p");
    let pass = killing <= 1e-12 && chart <= 1e-10 && ham <= 1e-12;
    Ok((pass, format!("killing norm {killing:.1e}, chart-global {chart:.1e}, H_w-H_p {ham:.1e}")))
}

fn symplectic_reduction() -> Outcome {
    let suites: Vec<_> = (1..=3).map(|n| reduction_suite(n, 50, 61)).collect::<Result<_, _>>()?;
    let orbit = worst(&suites, "gauge-orbit");
    let eom = worst(&suites, "reduced-eom").max(worst(&suites, "trajectory-agreement"));
    let chart = worst(&suites, "chart-recovery").max(worst(&suites, "chart-flow"));
    let current = worst(&suites, "reduced-vs-current");
    let pass = orbit <= 1e-12 && eom <= 1e-6 && chart <= 1e-6 && current <= 1e-10;
    Ok((
        pass,
        format!("orbit {orbit:.1e}, reduced eom {eom:.1e}, chart recovery {chart:.1e}, W/J vs current {current:.1e}"),
    ))
}

fn biyb_closed_forms() -> Outcome {
    let (eta, mu) = (0.7, 0.3);
    let su2 = biyb::su2_suite(eta, mu, 100, 71)?;
    let su3 = su3::suite(eta, mu, 100, 72)?;
    let mut gauge3 = SuiteReport::new("su3-general", 73, 20);
    biyb::general_suite(&su3::xi(), eta, mu, 20, 73, &mut gauge3)?;
    let reps = [su2, su3, gauge3];
    let s2 = worst(&reps[..1], "generic-vs-closed-plus-boundary").max(worst(&reps[..1], "closed-is-velocity-even-part"));
    let s3 = worst(&reps, "lagrangian");
    let limit = worst(&reps, "undeformed-limit").max(worst(&reps, "undeformed"));
    let gauge = worst(&reps, "gauge-invariance");
    let pass = s2 <= 1e-9 && s3 <= 1e-9 && limit <= 1e-9 && gauge <= 1e-9;
    Ok((
        pass,
        format!(
            "su2 {s2:.1e} (literal integrand {:.1e}, differs by d/dt F(x3)), su3 {s3:.1e} (uncorrected {:.1e}), limit {limit:.1e}, gauge {gauge:.1e}",
            noted(&reps, "generic-vs-closed-literal"),
            noted(&reps, "lagrangian-uncorrected"),
        ),
    ))
}

fn su3_matrices() -> Outcome {
    let rep = [su3::suite(0.7, 0.3, 100, 81)?, su3::suite(1.3, 0.9, 100, 82)?];
    let names = ["r-table", "pperp-table", "rk-table", "adjoint-factors", "inverse-vs-numeric", "block-times-inverse"];
    let max = names.iter().map(|n| worst(&rep, n)).fold(0.0, f64::max);
    Ok((
        max <= 1e-10,
        format!(
            "tables and inverse {max:.1e} (uncorrected block-inverse {:.1e})",
            noted(&rep, "block-times-inverse-uncorrected")
        ),
    ))
}

fn reproducibility() -> Outcome {
    let mut configs = Vec::new();
    for (command, model) in [
        (Command::Verify, ModelKind::Pcm),
        (Command::Verify, ModelKind::BiybSu3),
        (Command::LaxCheck, ModelKind::Pendulum),
        (Command::Reduce, ModelKind::Cpn),
        (Command::Appendix, ModelKind::BiybSu3),
        (Command::Parity, ModelKind::Pendulum),
        (Command::Parity, ModelKind::Pcm),
        (Command::Parity, ModelKind::Cpn),
        (Command::Parity, ModelKind::BiybSu2),
        (Command::Parity, ModelKind::YbCpn),
    ] {
        configs.push(ExperimentConfig {
            command: Some(command),
            model,
            samples: 10,
            seed: 91,
            t_end: 1.0,
            ..ExperimentConfig::default()
        });
    }
    let mut differing = Vec::new();
    for cfg in &configs {
        let a = cli::run(cfg);
        let b = cli::run(cfg);
        if a.report_json() != b.report_json() || a.csv != b.csv || a.code != 0 {
            differing.push(format!("{}/{}", cfg.command.unwrap(), cfg.model));
        }
    }
    let detail = if differing.is_empty() {
        format!("{} suites byte-identical on re-run", configs.len())
    } else {
        format!("differing or failing: {}", differing.join(", "))
    };
    Ok((differing.is_empty(), detail))
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 10] = [
        (1, "e-operator-axioms", e_operator_axioms, Some(Duration::from_secs(10))),
        (2, "sufficient-conditions", sufficient_conditions, Some(Duration::from_secs(30))),
        (3, "rmatrix-identity", rmatrix_relation, Some(Duration::from_secs(30))),
        (4, "isospectral-conservation", isospectral_conservation, Some(Duration::from_secs(120))),
        (5, "pendulum-equivalence", pendulum_equivalence, None),
        (6, "cpn-identities", cpn_identities, None),
        (7, "symplectic-reduction", symplectic_reduction, None),
        (8, "biyb-closed-forms", biyb_closed_forms, None),
        (9, "su3-matrices", su3_matrices, None),
        (10, "reproducibility", reproducibility, None),
    ];
    let mut failures = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok((pass, detail)) => {
                let in_time = limit.is_none_or(|l| elapsed <= l);
                let timing = match limit {
                    Some(l) => format!("{:.2}s of {}s", elapsed.as_secs_f64(), l.as_secs()),
                    None => format!("{:.2}s", elapsed.as_secs_f64()),
                };
                (pass && in_time, format!("{detail} [{timing}]"))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("{} {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
