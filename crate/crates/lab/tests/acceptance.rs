//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shortpulse::fv::flux;
use shortpulse::{
    derivative, entropy_suite, fv_integrate, godunov_flux, solve_p_regularized, EntropyBattery, Field64, FluxKind,
    FvParams, Grid64, PrimitiveRule, Ricker, TestBattery, Trajectory,
};
use shortpulse_lab::harness::{self, ConvergenceReport, SweepRuns, FINAL_RATIO, MONOTONE_SLACK};
use shortpulse_lab::{field_distance, run_mms, run_sweep, MmsConfig, SweepConfig};

struct Verdict {
    id: u32,
    pass: bool,
    detail: String,
}

fn verdict(id: u32, pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { id, pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_smooth(grid: &Grid64, seed: u64) -> Field64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (1..=grid.n_points() / 8)
        .map(|m| {
            let decay = (-(m as f64) / 8.0).exp();
            (decay * rng.gen_range(-1.0..1.0), decay * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let (l, x0) = (grid.length(), grid.x_left());
    Field64::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = 2.0 * std::f64::consts::PI * (i + 1) as f64 / l;
                a * (k * (x - x0)).cos() + b * (k * (x - x0)).sin()
            })
            .sum()
    })
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let g = Grid64::new(512, 40.0, -20.0).unwrap();
    let (mut res, mut energy, mut up) = (0.0_f64, 0.0_f64, 0.0_f64);
    for seed in 0..20 {
        let u = random_smooth(&g, seed);
        for eps in [1e-1, 1e-2, 1e-3] {
            let p = solve_p_regularized(&u, eps).unwrap().p;
            let (px, pxx) = (derivative(&p, 1), derivative(&p, 2));
            res = res.max(pxx.axpby(-eps, &px, 1.0).sub(&u).l2_norm() / u.l2_norm());
            energy = energy.max(rel(eps * eps * pxx.l2_norm().powi(2) + px.l2_norm().powi(2), u.l2_norm().powi(2)));
            up = up.max(rel(u.inner(&p), eps * px.l2_norm().powi(2)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        res <= 1e-10 && energy <= 1e-10 && up <= 1e-10 && secs < 5.0,
        format!(
            "elliptic identities on 20 fields x 3 eps: residual {res:.2e}, energy {energy:.2e}, uP {up:.2e} (tol 1e-10 rel), {secs:.2}s (limit 5s)"
        ),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let r = run_mms(&MmsConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        2,
        r.fitted_order >= 3.5 && r.finest_error <= 1e-8 && secs < 60.0,
        format!(
            "MMS fitted temporal order {:.3} (min 3.5), halving orders {:.3?}; max error at N=256, dt=1e-3 {:.2e} (tol 1e-8, bounds the spatial part); {secs:.2}s (limit 60s)",
            r.fitted_order, r.halving_orders, r.finest_error
        ),
    )
}

fn all_trajectories(sweep: &SweepRuns) -> Vec<&Trajectory<f64>> {
    std::iter::once(&sweep.reference).chain(sweep.fine_reference.iter()).chain(&sweep.runs).collect()
}

fn criterion_3(sweep: &SweepRuns) -> Verdict {
    let (mut drift, mut mean_p) = (0.0_f64, 0.0_f64);
    for tr in all_trajectories(sweep) {
        let m0 = tr.diagnostics[0].mean_u;
        for rec in &tr.diagnostics {
            drift = drift.max((rec.mean_u - m0).abs());
            mean_p = mean_p.max(rec.mean_p.abs() / rec.linf_p.max(f64::MIN_POSITIVE));
        }
        for u in &tr.snapshots {
            drift = drift.max((u.mean() - m0).abs());
        }
    }
    verdict(
        3,
        drift <= 1e-10 && mean_p <= 1e-12,
        format!("standard runs, both solvers: mean drift of u {drift:.2e} (tol 1e-10), |mean P|/|P|inf {mean_p:.2e} (tol 1e-12)"),
    )
}

fn criterion_4(sweep: &SweepRuns, config: &SweepConfig) -> Verdict {
    let mut worst = f64::INFINITY;
    for tr in &sweep.runs {
        let e0 = tr.snapshots[0].l2_norm().powi(2);
        for rec in tr.diagnostics.iter().filter(|r| r.t <= 2.0 + 1e-12) {
            worst = worst.min(rec.energy_margin / ((2.0 * config.gamma * rec.t).exp() * e0));
        }
    }
    verdict(
        4,
        worst >= -1e-6,
        format!("min energy_margin / (e^(2 gamma t) |u0|^2) over the standard dispersive runs {worst:.2e} (tol -1e-6)"),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (a, b): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (lo, hi) = (a.min(b), a.max(b));
        // dense sampling of the interval, endpoints included
        let samples = (0..=4096).map(|k| if k == 4096 { hi } else { lo + (hi - lo) * k as f64 / 4096.0 }).map(flux);
        let brute = if a <= b { samples.fold(f64::INFINITY, f64::min) } else { samples.fold(f64::NEG_INFINITY, f64::max) };
        if godunov_flux(a, b) != brute {
            mismatches += 1;
        }
    }
    verdict(5, mismatches == 0, format!("godunov_flux vs brute-force interval extremum on 1000 pairs: {mismatches} mismatches (exact)"))
}

fn fv_run(n: usize, t_final: f64) -> Trajectory<f64> {
    let h = 40.0 / n as f64;
    let g = Grid64::new(n, 40.0, -20.0 + 0.5 * h).unwrap();
    let u0 = Ricker::default().sample(&g).unwrap();
    let params = FvParams {
        gamma: 0.5,
        cfl: shortpulse::fv::DEFAULT_CFL,
        t_final,
        flux: FluxKind::Godunov,
        snapshot_interval: t_final / 20.0,
        diagnostics_interval: t_final / 20.0,
        primitive_rule: PrimitiveRule::Trapezoid,
    };
    fv_integrate(&u0, &params).unwrap()
}

fn rates(trs: &[Trajectory<f64>]) -> Vec<f64> {
    let d: Vec<f64> = trs.windows(2).map(|w| field_distance(w[0].last(), w[1].last(), [-20.0, 20.0], 1.0).unwrap()).collect();
    d.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let ns = [256, 512, 1024, 2048];
    let pre: Vec<_> = ns.iter().map(|&n| fv_run(n, 0.1)).collect();
    let post: Vec<_> = ns.iter().map(|&n| fv_run(n, 2.0)).collect();
    let (r_pre, r_post) = (rates(&pre), rates(&post));
    let battery = EntropyBattery::for_datum(&post[0].snapshots[0]).unwrap();
    let constants: Vec<f64> = post
        .iter()
        .map(|tr| {
            let tests = TestBattery::covering(tr).unwrap();
            entropy_suite(tr, &battery, &tests).unwrap().violation / tr.grid.spacing()
        })
        .collect();
    let decreasing = constants.windows(2).all(|w| w[1] < w[0]);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        6,
        r_pre.iter().all(|&r| r >= 0.4) && r_post.iter().all(|&r| r >= 0.3) && decreasing && secs < 120.0,
        format!(
            "FV L1 self-convergence rates pre-breaking {r_pre:.3?} (min 0.4), post-breaking {r_post:.3?} (min 0.3); violation/spacing C = {constants:.3?} (decreasing); {secs:.2}s (limit 120s)"
        ),
    )
}

fn l1_series(report: &ConvergenceReport) -> impl Iterator<Item = &harness::DistanceSeries> {
    report.distances.iter().filter(|d| d.p == 1.0)
}

fn criterion_7(report: &ConvergenceReport, secs: f64) -> Verdict {
    let mut ok = secs < 300.0;
    let mut parts = Vec::new();
    for d in l1_series(report) {
        let v: Vec<f64> = d.distances.iter().map(|x| x.unwrap_or(f64::NAN)).collect();
        let monotone = v.windows(2).all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK));
        let ratio = v[v.len() - 1] / v[0];
        ok &= monotone && ratio <= FINAL_RATIO;
        parts.push(format!("t={}: {v:.4?} final/first {ratio:.3}", d.t));
    }
    ok &= report.verdicts.all_runs_completed;
    verdict(
        7,
        ok,
        format!(
            "beta = eps^2, L1[-10,10] distance to reference {} (non-increasing within 5%, final/first <= 0.5); sweep {secs:.1}s (limit 300s)",
            parts.join("; ")
        ),
    )
}

fn criterion_8(report: &ConvergenceReport) -> Verdict {
    let v: Vec<f64> = report.entropy_violations.iter().map(|x| x.unwrap_or(f64::NAN)).collect();
    let entropy_ok = v.windows(2).all(|w| w[1] <= w[0]);
    let pc = &report.p_convergence;
    let slope = pc.eps_linf_dxp_slope;
    let bound = pc.max_sqrt_eps_dxp_over_l2_u;
    verdict(
        8,
        entropy_ok && slope >= 0.5 - 0.2 && bound <= 1.0 + 1e-8,
        format!(
            "beta = eps^3, entropy violation {} (non-increasing); eps|dxP|inf slope {slope:.3} vs eps (must not fall below 1/2 - 0.2); max sqrt(eps)|dxP|inf/|u|2 {bound:.3} (<= 1)",
            v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_9(report: &ConvergenceReport) -> Verdict {
    let s = report.scaling.as_ref().expect("scaling block");
    verdict(
        9,
        s.linf_u_vs_beta_slope >= -0.6 && s.max_linf_p <= 2.0 * s.coarsest_linf_p,
        format!(
            "beta = eps^2, slope of sup|u|inf vs beta {:.3} (min -0.6); max |P|inf {:.4} vs 2 x coarsest {:.4}",
            s.linf_u_vs_beta_slope, s.max_linf_p, 2.0 * s.coarsest_linf_p
        ),
    )
}

fn diagnostics_bytes(out: &Path, n_runs: usize) -> Vec<Vec<u8>> {
    let mut dirs = vec![out.join("reference"), out.join("reference_fine")];
    dirs.extend((0..n_runs).map(|i| harness::run_dir(out, i)));
    dirs.iter().map(|d| std::fs::read(d.join("diagnostics.csv")).unwrap()).collect()
}

fn criterion_10(config: &SweepConfig, first: (&ConvergenceReport, &SweepRuns)) -> Verdict {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    harness::write_sweep(a.path(), config, first.1, first.0).unwrap();
    let (report, runs) = run_sweep(config, 2).unwrap();
    harness::write_sweep(b.path(), config, &runs, &report).unwrap();
    let n = config.epsilons.len();
    let (x, y) = (diagnostics_bytes(a.path(), n), diagnostics_bytes(b.path(), n));
    let same = x.iter().zip(&y).filter(|(p, q)| p == q).count();
    verdict(10, same == x.len(), format!("repeated beta = eps^2 sweep: {same}/{} diagnostics.csv files bitwise identical", x.len()))
}

fn main() {
    let mut verdicts = vec![criterion_1(), criterion_2(), criterion_5(), criterion_6()];

    let p2 = SweepConfig::standard(2.0);
    let start = Instant::now();
    let (report2, sweep2) = run_sweep(&p2, 4).unwrap();
    let secs2 = start.elapsed().as_secs_f64();
    let p3 = SweepConfig::standard(3.0);
    let (report3, _) = run_sweep(&p3, 4).unwrap();

    verdicts.push(criterion_3(&sweep2));
    verdicts.push(criterion_4(&sweep2, &p2));
    verdicts.push(criterion_7(&report2, secs2));
    verdicts.push(criterion_8(&report3));
    verdicts.push(criterion_9(&report2));
    verdicts.push(criterion_10(&p2, (&report2, &sweep2)));
    verdicts.sort_by_key(|v| v.id);

    for v in &verdicts {
        println!("{} criterion {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.id, v.detail);
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
