//! Experiment orchestration behind the `logwave` subcommands.
//!
//! Every subcommand writes CSV files with a header row into an output
//! directory. Floats are printed with 17 significant digits, so identical
//! configurations produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{
    fit_decay, fit_decay_series, gronwall_self_consistency, log_sobolev_slack, nakao_constants,
    nakao_difference_check, optimal_delta, unit_samples, DecayFit, NakaoCheck,
    DELTA_CROSS_CHECK_TOL,
};
use crate::config::ExperimentConfig;
use crate::corpus::random_fourier_corpus;
use crate::error::{Error, Result};
use crate::fem1d::{assemble, build_mesh, project_initial};
use crate::integrator::{simulate, SimConfig, Trajectory};
use crate::lognonlin::{depth_lower_bound, well_status, GridFunction, WellStatus};

/// Relative slack of the per-step energy balance.
pub const DISSIPATION_TOL: f64 = 1e-8;
/// Minimum coefficient of determination for an accepted decay fit.
pub const MIN_R2: f64 = 0.99;
/// Horizon needed before the unit-step Nakao check is meaningful.
pub const NAKAO_MIN_HORIZON: f64 = 10.0;
pub const LOG_SOBOLEV_PARAMS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
pub const CHECK_GAMMAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// `(w₀, a)` grid of the Gronwall self-consistency check.
pub const GRONWALL_CASES: [(f64, f64); 8] = [
    (0.0, 1.0),
    (0.5, 1.0),
    (1.0, 1.0),
    (3.0, 1.0),
    (0.5, 1.5),
    (3.0, 2.0),
    (10.0, 1.5),
    (10.0, 2.0),
];

pub const ENERGY_HEADER: &str =
    "t,kinetic,dirichlet,mass,log_term,gamma_term,penalty,E,E_pen,E_plus,I1,J1,in_well";
pub const SWEEP_HEADER: &str = "epsilon,m,max_penalty_l2sq,beta_hat,nakao_ok";
pub const WELL_HEADER: &str = "gamma,I1,J1,d_bound,in_well";
pub const FIT_HEADER: &str = "t_start,t_end,beta_hat,r2,beta_paper,delta_used,envelope_ok";
pub const CHECK_HEADER: &str = "suite,case,parameter,value,ok";

/// Fixed-width float formatting used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of a subcommand: named invariant failures plus text for stdout.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub failures: Vec<String>,
    pub stdout: String,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Diagnostics of a single simulation together with the invariants it engaged.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub trajectory: Trajectory,
    pub dissipation_violations: Vec<usize>,
    /// `0 < E(0) < d_bound` and `I₁(u₀) > 0`.
    pub well_data: bool,
    pub in_well_fraction: f64,
    /// Decay fit on `E`, when `E > 0` throughout the window.
    pub fit: Option<DecayFit>,
    /// Unit-spaced Nakao check of `E_pen`, engaged for well data with `a = b = 1` and `T ≥ 10`.
    pub nakao: Option<NakaoCheck>,
    pub failures: Vec<String>,
}

/// Simulates `sim` and evaluates every invariant that applies to it.
pub fn run_report(sim: &SimConfig, window_fraction: f64, fit_tol: f64) -> Result<RunReport> {
    let traj = simulate(sim)?;
    let mut failures = Vec::new();

    let dissipation_violations = traj.dissipation_violations(DISSIPATION_TOL);
    if let Some(&k) = dissipation_violations.first() {
        failures.push(format!(
            "energy_dissipation: {} violating steps, first at t = {}",
            dissipation_violations.len(),
            traj.steps[k].state.t
        ));
    }

    let first = &traj.steps[0].report;
    let well_data = first.e > 0.0 && first.e < depth_lower_bound(sim.gamma) && first.i1 > 0.0;
    let in_well = traj.steps.iter().filter(|s| s.report.in_well).count();
    let in_well_fraction = in_well as f64 / traj.steps.len() as f64;
    if well_data && in_well < traj.steps.len() {
        let t = traj
            .steps
            .iter()
            .find(|s| !s.report.in_well)
            .map_or(f64::NAN, |s| s.state.t);
        failures.push(format!(
            "well_invariance: trajectory leaves the well at t = {t}"
        ));
    }

    let fit = fit_decay(&traj, window_fraction, fit_tol).ok();
    let mut nakao = None;
    if well_data && sim.a == 1.0 && sim.b == 1.0 && sim.horizon >= NAKAO_MIN_HORIZON {
        match &fit {
            Some(f) if f.beta_hat > 0.0 && f.r2 >= MIN_R2 && f.envelope_ok => {}
            Some(f) => failures.push(format!(
                "decay_fit: beta_hat = {}, r2 = {}, envelope_ok = {}",
                f.beta_hat, f.r2, f.envelope_ok
            )),
            None => failures.push("decay_fit: energy not positive on the fit window".into()),
        }
        let delta = optimal_delta(sim.gamma)?.delta;
        let c = nakao_constants(delta, sim.gamma)?;
        let series = unit_samples(&traj.times(), &traj.series(|r| r.e_pen));
        let check = nakao_difference_check(&series, c.d2, c.d3);
        if !check.holds {
            failures.push(format!(
                "nakao_difference: violated at unit steps {:?}",
                check.violations
            ));
        }
        nakao = Some(check);
    }

    Ok(RunReport {
        trajectory: traj,
        dissipation_violations,
        well_data,
        in_well_fraction,
        fit,
        nakao,
        failures,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn energy_csv(traj: &Trajectory) -> String {
    let mut out = String::from(ENERGY_HEADER);
    out.push('\n');
    for s in &traj.steps {
        let r = &s.report;
        let nums = [
            r.t,
            r.kinetic,
            r.dirichlet,
            r.mass,
            r.log_term,
            r.gamma_term,
            r.penalty,
            r.e,
            r.e_pen,
            r.e_plus,
            r.i1,
            r.j1,
        ];
        for x in nums {
            out.push_str(&fmt_f64(x));
            out.push(',');
        }
        writeln!(out, "{}", r.in_well).unwrap();
    }
    out
}

fn summary_csv(report: &RunReport) -> String {
    let traj = &report.trajectory;
    let mut rows: Vec<(&str, String)> = vec![
        ("steps", (traj.steps.len() - 1).to_string()),
        ("dt", fmt_f64(traj.dt)),
        ("E0", fmt_f64(traj.steps[0].report.e)),
        (
            "E_final",
            fmt_f64(traj.steps[traj.steps.len() - 1].report.e),
        ),
        ("max_penalty_l2sq", fmt_f64(traj.max_penalty_l2sq())),
        ("apriori_max", fmt_f64(traj.apriori_max())),
        (
            "dissipation_violations",
            report.dissipation_violations.len().to_string(),
        ),
        ("well_data", report.well_data.to_string()),
        ("in_well_fraction", fmt_f64(report.in_well_fraction)),
    ];
    if let Some(f) = &report.fit {
        rows.extend([
            ("beta_hat", fmt_f64(f.beta_hat)),
            ("r2", fmt_f64(f.r2)),
            ("envelope_ok", f.envelope_ok.to_string()),
            ("beta_paper", fmt_f64(f.beta_paper)),
            ("delta_used", fmt_f64(f.delta_used)),
        ]);
    }
    if let Some(n) = &report.nakao {
        rows.extend([
            ("nakao_ok", n.holds.to_string()),
            ("nakao_contraction", fmt_f64(n.contraction)),
        ]);
    }
    rows.push(("passed", report.failures.is_empty().to_string()));
    let mut out = String::from("metric,value\n");
    for (k, v) in rows {
        writeln!(out, "{k},{v}").unwrap();
    }
    out
}

/// Writes the last finite snapshot of a diverged run as `x,u,u_t` rows.
fn write_divergence(err: &Error, cfg: &SimConfig, out: &Path) -> Result<()> {
    if let Error::Divergence { t, last } = err {
        let mesh = build_mesh(cfg.domain.ambient, cfg.m)?;
        let mut csv = format!(
            "# diverged at t = {}; snapshot at t = {}\nx,u,u_t\n",
            fmt_f64(*t),
            fmt_f64(last.t)
        );
        for ((x, g), v) in mesh.interior_nodes().iter().zip(&last.g).zip(&last.v) {
            writeln!(csv, "{},{},{}", fmt_f64(*x), fmt_f64(*g), fmt_f64(*v)).unwrap();
        }
        write_file(&out.join("last_snapshot.csv"), &csv)?;
    }
    Ok(())
}

fn run_into(sim: &SimConfig, cfg: &ExperimentConfig, out: &Path) -> Result<RunReport> {
    let report = run_report(sim, cfg.window_fraction, cfg.fit_tol).inspect_err(|e| {
        let _ = write_divergence(e, sim, out);
    })?;
    write_file(&out.join("energy.csv"), &energy_csv(&report.trajectory))?;
    write_file(&out.join("summary.csv"), &summary_csv(&report))?;
    Ok(report)
}

/// Single simulation: `energy.csv` and `summary.csv`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let report = run_into(&cfg.sim, cfg, out)?;
    Ok(Outcome {
        failures: report.failures,
        stdout: String::new(),
    })
}

pub fn cell_dir_name(epsilon: f64, m: usize) -> String {
    format!("eps{epsilon:e}_m{m}")
}

/// Runs the ε × m plan on `workers` threads (default: available parallelism).
///
/// Each cell writes its own `energy.csv`/`summary.csv`; `sweep_summary.csv`
/// lists the cells in plan order. For each `m`, `max_t ‖χu‖²` must decrease
/// strictly as ε decreases.
pub fn sweep(cfg: &ExperimentConfig, out: &Path, workers: Option<usize>) -> Result<Outcome> {
    let plan = cfg.sweep_plan();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Argument(format!("worker pool: {e}")))?;
    let reports: Vec<Result<RunReport>> = pool.install(|| {
        plan.par_iter()
            .map(|&(epsilon, m)| {
                let sim = SimConfig {
                    epsilon,
                    m,
                    ..cfg.sim.clone()
                };
                run_into(&sim, cfg, &out.join(cell_dir_name(epsilon, m)))
            })
            .collect()
    });
    let reports: Vec<RunReport> = reports.into_iter().collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for (&(epsilon, m), r) in plan.iter().zip(&reports) {
        for f in &r.failures {
            failures.push(format!("{}: {f}", cell_dir_name(epsilon, m)));
        }
        writeln!(
            csv,
            "{},{m},{},{},{}",
            fmt_f64(epsilon),
            fmt_f64(r.trajectory.max_penalty_l2sq()),
            fmt_f64(r.fit.map_or(f64::NAN, |f| f.beta_hat)),
            r.nakao
                .as_ref()
                .map_or("NA".into(), |n| n.holds.to_string()),
        )
        .unwrap();
    }
    write_file(&out.join("sweep_summary.csv"), &csv)?;

    let mut stdout = String::new();
    let mut ms: Vec<usize> = plan.iter().map(|p| p.1).collect();
    ms.sort_unstable();
    ms.dedup();
    for m in ms {
        let mut column: Vec<(f64, f64)> = plan
            .iter()
            .zip(&reports)
            .filter(|(p, _)| p.1 == m)
            .map(|(p, r)| (p.0, r.trajectory.max_penalty_l2sq()))
            .collect();
        column.sort_by(|x, y| y.0.total_cmp(&x.0));
        for w in column.windows(2) {
            let ratio = w[0].1 / w[1].1;
            writeln!(
                stdout,
                "m = {m}: max ‖χu‖² ratio eps {} -> {} = {ratio:.4}",
                w[0].0, w[1].0
            )
            .unwrap();
            if !(w[1].1 < w[0].1) {
                failures.push(format!(
                    "penalty_vanishing: m = {m}, max ‖χu‖² does not decrease from eps = {} to {}",
                    w[0].0, w[1].0
                ));
            }
        }
    }
    Ok(Outcome { failures, stdout })
}

/// Well membership of the projected initial displacement.
pub fn well_of_initial_data(sim: &SimConfig) -> Result<WellStatus> {
    sim.validate()?;
    let fam = sim.family()?;
    let sys = assemble(&build_mesh(fam.ambient(), sim.m)?);
    let omega0 = fam.initial();
    let u0 = |x: f64| sim.initial.u0.eval(x, omega0);
    let u1 = |x: f64| sim.initial.u1.eval(x, omega0);
    let (g0, _) = project_initial(&u0, &u1, &sys, &fam, sim.projection)?;
    Ok(well_status(
        GridFunction::new(&sys.mesh, &g0)?,
        &sys,
        sim.gamma,
    ))
}

/// `well.csv` with a single row; the row is also returned for stdout.
pub fn well(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let w = well_of_initial_data(&cfg.sim)?;
    let row = format!(
        "{},{},{},{},{}",
        fmt_f64(cfg.sim.gamma),
        fmt_f64(w.i1),
        fmt_f64(w.j1),
        fmt_f64(w.d_bound),
        w.in_well
    );
    let csv = format!("{WELL_HEADER}\n{row}\n");
    write_file(&out.join("well.csv"), &csv)?;
    Ok(Outcome {
        failures: vec![],
        stdout: csv,
    })
}

/// Inequality suites: log-Sobolev over the seeded corpus, logarithmic
/// Gronwall self-consistency, and the optimal-δ cross-check.
pub fn check(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg.sim.domain.ambient, cfg.sim.m)?;
    let sys = assemble(&mesh);
    let corpus = random_fourier_corpus(&mesh, cfg.check_seed, cfg.corpus_size, cfg.max_modes);
    let mut csv = String::from(CHECK_HEADER);
    csv.push('\n');
    let mut failures = Vec::new();

    let mut ls_violations = 0;
    for (i, g) in corpus.iter().enumerate() {
        let u = GridFunction::new(&mesh, g)?;
        let scale = 1.0 + sys.mass.quad_form(g) + sys.stiffness.quad_form(g);
        for a in LOG_SOBOLEV_PARAMS {
            let slack = log_sobolev_slack(u, &sys, a)?;
            let ok = slack >= -1e-10 * scale;
            ls_violations += usize::from(!ok);
            writeln!(
                csv,
                "log_sobolev,{i},{},{},{ok}",
                fmt_f64(a),
                fmt_f64(slack)
            )
            .unwrap();
        }
    }
    if ls_violations > 0 {
        failures.push(format!("log_sobolev: {ls_violations} violations"));
    }

    for (i, (w0, a)) in GRONWALL_CASES.into_iter().enumerate() {
        let ratio = gronwall_self_consistency(w0, a, 1.0, 20_000)?;
        let ok = ratio <= 1.0 + 1e-9;
        if !ok {
            failures.push(format!("log_gronwall: w0 = {w0}, a = {a}, ratio {ratio}"));
        }
        writeln!(
            csv,
            "log_gronwall,{i},{},{},{ok}",
            fmt_f64(w0),
            fmt_f64(ratio)
        )
        .unwrap();
    }

    for (i, gamma) in CHECK_GAMMAS.into_iter().enumerate() {
        let d = optimal_delta(gamma)?;
        let gap = (d.formula - d.numerical).abs();
        let ok = gap <= DELTA_CROSS_CHECK_TOL;
        if !ok {
            failures.push(format!("optimal_delta: gamma = {gamma}, gap {gap}"));
        }
        writeln!(
            csv,
            "optimal_delta,{i},{},{},{ok}",
            fmt_f64(gamma),
            fmt_f64(gap)
        )
        .unwrap();
    }
    write_file(&out.join("check.csv"), &csv)?;

    let summary = format!(
        "metric,value\nseed,{}\ncorpus_size,{}\nmax_modes,{}\nlog_sobolev_violations,{ls_violations}\npassed,{}\n",
        cfg.check_seed,
        cfg.corpus_size,
        cfg.max_modes,
        failures.is_empty()
    );
    write_file(&out.join("check_summary.csv"), &summary)?;
    Ok(Outcome {
        failures,
        stdout: summary,
    })
}

/// Reads the `t` and `E` columns of an `energy.csv`.
pub fn read_energy_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Fit(format!("{}: empty file", path.display())))?
        .split(',')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Fit(format!("{}: missing column `{name}`", path.display())))
    };
    let (ti, ei) = (col("t")?, col("E")?);
    let (mut ts, mut es) = (vec![], vec![]);
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Fit(format!("{}: bad row {}", path.display(), n + 2)))
        };
        ts.push(get(ti)?);
        es.push(get(ei)?);
    }
    Ok((ts, es))
}

pub fn fit_csv(f: &DecayFit) -> String {
    format!(
        "{FIT_HEADER}\n{},{},{},{},{},{},{}\n",
        fmt_f64(f.t_start),
        fmt_f64(f.t_end),
        fmt_f64(f.beta_hat),
        fmt_f64(f.r2),
        fmt_f64(f.beta_paper),
        fmt_f64(f.delta_used),
        f.envelope_ok
    )
}

/// Decay fit of an existing `energy.csv` (`fit.energy_csv`, else `<out>/energy.csv`).
pub fn fit(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let input: PathBuf = cfg
        .energy_csv
        .clone()
        .unwrap_or_else(|| out.join("energy.csv"));
    let (ts, es) = read_energy_csv(&input)?;
    let f = fit_decay_series(&ts, &es, cfg.window_fraction, cfg.fit_tol, cfg.sim.gamma)?;
    let csv = fit_csv(&f);
    write_file(&out.join("fit.csv"), &csv)?;
    let mut failures = vec![];
    if !(f.beta_hat > 0.0) {
        failures.push(format!("decay_rate: beta_hat = {}", f.beta_hat));
    }
    if !f.envelope_ok {
        failures.push("decay_envelope: energy exceeds the fitted envelope".into());
    }
    Ok(Outcome {
        failures,
        stdout: csv,
    })
}
