use std::path::{Path, PathBuf};

use critmet_core::benchmarks::{
    self, Abscissa, Crossover, EstimationReport, PhotonModel, ProtocolSpec, ScalingFit,
};
use critmet_core::dissipative;
use critmet_core::effective;
use critmet_core::fock::{self, CutoffPolicy, GridSpec};
use critmet_core::gaussian::GaussianState;
use critmet_core::output::{Cell, Table};
use critmet_core::sweep;
use critmet_core::{Estimand, RabiParams};
use rayon::prelude::*;

use crate::config::{arange, RunConfig};
use crate::error::CliError;
use crate::output::Writer;

type Files = Result<Vec<PathBuf>, CliError>;

fn cutoff_policy(cfg: &RunConfig) -> CutoffPolicy {
    cfg.cutoff.map_or_else(CutoffPolicy::default, CutoffPolicy::Fixed)
}

fn check_finite(values: &[f64], what: &str) -> Result<(), CliError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(CliError::new("config", format!("{what} contains non-finite value {v}"))),
        None => Ok(()),
    }
}

/// Sorts rows lexicographically by their numeric keys and appends them.
fn fill(table: &mut Table, mut rows: Vec<(Vec<f64>, Vec<Cell>)>) {
    rows.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for (_, r) in rows {
        table.push(r);
    }
}

fn estimand_key(which: Estimand) -> f64 {
    match which {
        Estimand::Omega => 0.0,
        Estimand::Omega0 => 1.0,
    }
}

fn effective_qfi(p: &RabiParams, which: Estimand) -> Result<f64, CliError> {
    Ok(if p.g() < 1.0 {
        effective::normal_solution(p)?.qfi(which)
    } else {
        effective::superradiant_solution(p, effective::Branch::Plus)?.qfi(which)
    })
}

fn exact_qfi(p: &RabiParams, which: Estimand, cfg: &RunConfig) -> Result<(usize, f64), CliError> {
    let cutoff = cutoff_policy(cfg).resolve(p)?;
    Ok((cutoff, fock::qfi_numeric(p, which, cutoff, cfg.delta)?))
}

fn fig1_grid() -> Vec<f64> {
    let mut g = arange(0.05, 0.95, 0.05);
    g.extend(arange(1.05, 1.5, 0.05));
    g
}

/// Signal-to-noise ratio and homodyne efficiency against g for several frequency ratios.
pub fn fig1(cfg: &mut RunConfig, out: &Path) -> Files {
    let grid = cfg.grid_or(fig1_grid);
    check_finite(&grid, "g grid")?;
    if let Some(g) = grid.iter().find(|g| **g <= 0.0 || **g == 1.0) {
        return Err(CliError::new("config", format!("invalid grid: g = {g} must lie in (0, 1) or above 1")));
    }
    if let Some(e) = cfg.etas.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(CliError::new("config", format!("invalid frequency ratio {e}")));
    }
    let omega0 = cfg.params.omega0;
    let mut jobs = Vec::new();
    for &eta in &cfg.etas {
        for &g in &grid {
            jobs.push((eta, RabiParams::new(omega0, omega0 / eta, g)?));
        }
    }
    let angle = cfg.angle;
    let results: Vec<_> = jobs
        .par_iter()
        .flat_map_iter(|&(eta, p)| Estimand::ALL.into_iter().map(move |which| (eta, p, which)))
        .map(|(eta, p, which)| -> Result<_, CliError> {
            let cutoff = cutoff_policy(cfg).resolve(&p)?;
            let qfi = fock::qfi_numeric(&p, which, cutoff, cfg.delta)?;
            let fi = fock::classical_fi(&p, which, angle, cutoff, cfg.delta, fock::default_grid(&p))?;
            let a = p.frequency(which);
            let q_eff = a * a * effective_qfi(&p, which)?;
            Ok((eta, p.g(), which, q_eff, a * a * qfi, fi, qfi))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.context("fig1"))?;

    let mut snr = Table::new(&["g", "eta", "parameter", "q_effective", "q_exact"]);
    let mut homodyne = Table::new(&["g", "eta", "parameter", "fi", "qfi", "fi_over_qfi"]);
    let mut snr_rows = Vec::new();
    let mut hom_rows = Vec::new();
    for &(eta, g, which, q_eff, q_exact, fi, qfi) in &results {
        let key = vec![g, -eta, estimand_key(which)];
        snr_rows.push((key.clone(), vec![g.into(), eta.into(), which.name().into(), q_eff.into(), q_exact.into()]));
        hom_rows.push((key, vec![g.into(), eta.into(), which.name().into(), fi.into(), qfi.into(), (fi / qfi).into()]));
    }
    fill(&mut snr, snr_rows);
    fill(&mut homodyne, hom_rows);
    let w = Writer::new(out, "fig1", cfg)?;
    Ok(vec![
        w.write("fig1_snr", &snr, &["Q = A^2 I_A".into()])?,
        w.write("fig1_homodyne", &homodyne, &[format!("angle = {angle}")])?,
    ])
}

fn qfi_grid() -> Vec<f64> {
    let mut g = arange(0.1, 0.9, 0.1);
    g.extend([0.95, 0.99, 1.1, 1.2, 1.5]);
    g
}

/// Exact against effective-model QFI along g.
pub fn qfi(cfg: &mut RunConfig, out: &Path) -> Files {
    let grid = cfg.grid_or(qfi_grid);
    check_finite(&grid, "g grid")?;
    let base = cfg.params.rabi()?;
    let points: Vec<RabiParams> = grid.iter().map(|&g| base.with_g(g)).collect::<Result<_, _>>()?;
    let rows = points
        .par_iter()
        .flat_map_iter(|p| Estimand::ALL.into_iter().map(move |w| (*p, w)))
        .map(|(p, which)| -> Result<_, CliError> {
            let (cutoff, q) = exact_qfi(&p, which, cfg)?;
            let nbar = fock::ground_state(&p, cutoff)?.state.mean_photon();
            let row: Vec<Cell> = vec![
                p.g().into(),
                which.name().into(),
                (cutoff as f64).into(),
                nbar.into(),
                effective::predicted_photons(&p).into(),
                q.into(),
                effective_qfi(&p, which)?.into(),
            ];
            Ok((vec![p.g(), estimand_key(which)], row))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.context("qfi"))?;
    let mut t = Table::new(&["g", "parameter", "cutoff", "nbar_exact", "nbar_effective", "qfi_exact", "qfi_effective"]);
    fill(&mut t, rows);
    let w = Writer::new(out, "qfi", cfg)?;
    Ok(vec![w.write("qfi", &t, &[])?])
}

/// Homodyne Fisher information along g and the quadrature distribution at `params.g`.
pub fn homodyne(cfg: &mut RunConfig, out: &Path) -> Files {
    let grid = cfg.grid_or(|| arange(0.1, 0.9, 0.1));
    check_finite(&grid, "g grid")?;
    let base = cfg.params.rabi()?;
    let points: Vec<RabiParams> = grid.iter().map(|&g| base.with_g(g)).collect::<Result<_, _>>()?;
    let xgrid = match cfg.x_grid {
        Some(x) => Some(GridSpec::new(x.min, x.max, x.points)?),
        None => None,
    };
    let angle = cfg.angle;
    let rows = points
        .par_iter()
        .flat_map_iter(|p| Estimand::ALL.into_iter().map(move |w| (*p, w)))
        .map(|(p, which)| -> Result<_, CliError> {
            let (cutoff, q) = exact_qfi(&p, which, cfg)?;
            let x = xgrid.unwrap_or_else(|| fock::default_grid(&p));
            let fi = fock::classical_fi(&p, which, angle, cutoff, cfg.delta, x)?;
            let row: Vec<Cell> = vec![p.g().into(), which.name().into(), fi.into(), q.into(), (fi / q).into()];
            Ok((vec![p.g(), estimand_key(which)], row))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.context("homodyne"))?;
    let mut fi_table = Table::new(&["g", "parameter", "fi", "qfi", "fi_over_qfi"]);
    fill(&mut fi_table, rows);

    let cutoff = cutoff_policy(cfg).resolve(&base)?;
    let gs = fock::ground_state(&base, cutoff)?.state;
    let dist = fock::homodyne_distribution(&gs, angle, xgrid.unwrap_or_else(|| fock::default_grid(&base)))?;
    let mut d = Table::new(&["x", "p"]);
    for (x, p) in dist.grid.iter().zip(&dist.densities) {
        d.push(vec![*x, *p]);
    }
    let notes = [
        format!("g = {}, angle = {angle}, cutoff = {cutoff}", base.g()),
        format!("mean = {}, variance = {}", dist.moment(1), dist.moment(2) - dist.moment(1).powi(2)),
    ];
    let w = Writer::new(out, "homodyne", cfg)?;
    Ok(vec![w.write("homodyne_fi", &fi_table, &[format!("angle = {angle}")])?, w.write("homodyne_distribution", &d, &notes)?])
}

/// Optimal sweep schedule to `params.g`, optionally integrated in the Fock basis.
pub fn sweep(cfg: &mut RunConfig, out: &Path) -> Files {
    let p = cfg.params.rabi()?;
    let s = cfg.params.sweep()?;
    let schedule = sweep::build_schedule(&p, &s)?;
    let mut t = Table::new(&["t", "g", "v", "excitation_probability"]);
    for (time, g, v) in schedule.samples(cfg.schedule_points) {
        let excitation = if g < 1.0 { sweep::excitation_probability_for_speed(v, p.omega0(), g) } else { f64::NAN };
        t.push(vec![time, g, v, excitation]);
    }
    let w = Writer::new(out, "sweep", cfg)?;
    let mut files = vec![w.write("sweep_schedule", &t, &[format!("total_time = {}", schedule.total_time())])?];
    if cfg.integrate {
        let dt = cfg.dt.unwrap_or(0.01 / p.omega().max(p.omega0()));
        let cutoff = cutoff_policy(cfg).resolve(&p)?;
        let res = fock::integrate_sweep(&p, &schedule, cutoff, dt).map_err(|e| CliError::from(e).context("sweep"))?;
        let mut r = Table::new(&["t", "g", "norm", "ground_infidelity"]);
        for smp in &res.samples {
            r.push(vec![smp.t, smp.g, smp.norm, smp.ground_infidelity]);
        }
        let notes = [
            format!("cutoff = {cutoff}, dt = {dt}, steps = {}", res.steps),
            format!("final_infidelity = {}", res.final_infidelity),
            format!("predicted_infidelity = {}", sweep::excitation_probability(&s, p.g())?),
            format!("max_norm_drift = {}", res.max_norm_drift),
        ];
        files.push(w.write("sweep_integration", &r, &notes)?);
    }
    Ok(files)
}

fn fraction_grid() -> Vec<f64> {
    let mut g = arange(0.0, 0.9, 0.1);
    g.extend([0.95, 0.99, 0.999]);
    g
}

/// Steady states along g (in units of g_c), and optional relaxation from the vacuum.
pub fn dissipative(cfg: &mut RunConfig, out: &Path) -> Files {
    let grid = cfg.grid_or(fraction_grid);
    check_finite(&grid, "g grid")?;
    let base = cfg.params.rabi()?;
    let diss = cfg.params.dissipation()?;
    let gc = diss.critical_coupling(&base);
    let points: Vec<RabiParams> = grid.iter().map(|&f| base.with_g(f * gc)).collect::<Result<_, _>>()?;
    let rows = points
        .par_iter()
        .map(|p| -> Result<_, CliError> {
            let st = dissipative::steady_state(p, &diss)?;
            let c = st.cov();
            let row: Vec<Cell> = vec![
                p.g().into(),
                (p.g() / gc).into(),
                c[(0, 0)].into(),
                c[(0, 1)].into(),
                c[(1, 1)].into(),
                st.mean_photon().into(),
                dissipative::relaxation_time(p, &diss)?.into(),
                dissipative::dissipative_qfi(p, &diss, Estimand::Omega)?.into(),
                dissipative::dissipative_qfi(p, &diss, Estimand::Omega0)?.into(),
            ];
            Ok((vec![p.g()], row))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.context("dissipative"))?;
    let mut t = Table::new(&[
        "g",
        "g_over_gc",
        "sigma_xx",
        "sigma_xp",
        "sigma_pp",
        "nbar",
        "relaxation_time",
        "qfi_Omega",
        "qfi_omega0",
    ]);
    fill(&mut t, rows);
    let w = Writer::new(out, "dissipative", cfg)?;
    let mut files = vec![w.write("dissipative_steady", &t, &[format!("g_c = {gc}")])?];
    if !cfg.times.is_empty() {
        check_finite(&cfg.times, "times")?;
        let flow = dissipative::build_flow(&base, &diss);
        let vacuum = GaussianState::vacuum();
        let mut times = cfg.times.clone();
        times.sort_by(f64::total_cmp);
        let mut e = Table::new(&["t", "sigma_xx", "sigma_xp", "sigma_pp", "nbar"]);
        for time in times {
            let s = dissipative::evolve_covariance(&flow, &vacuum, time)?;
            let c = s.cov();
            e.push(vec![time, c[(0, 0)], c[(0, 1)], c[(1, 1)], s.mean_photon()]);
        }
        files.push(w.write("dissipative_evolution", &e, &[format!("g = {}", base.g())])?);
    }
    Ok(files)
}

fn abscissa_name(a: Abscissa) -> &'static str {
    match a {
        Abscissa::Time => "T",
        Abscissa::PhotonsTime => "N*T",
        Abscissa::PhotonsSquaredTimeSquared => "N^2*T^2",
    }
}

fn crossover_cells(c: Crossover) -> (&'static str, f64) {
    match c {
        Crossover::At(t) => ("at", t),
        Crossover::Always => ("always", 0.0),
        Crossover::Never => ("never", f64::INFINITY),
    }
}

/// Protocol reports along g, near-critical scaling fits and Ramsey crossover times.
pub fn benchmark(cfg: &mut RunConfig, out: &Path) -> Files {
    let grid = cfg.grid_or(|| {
        let mut g = arange(0.1, 0.9, 0.1);
        g.extend([0.95, 0.99]);
        g
    });
    check_finite(&grid, "g grid")?;
    let base = cfg.params.rabi()?;
    let sweep_params = cfg.params.sweep()?;
    let diss = cfg.params.dissipation()?;
    let gamma = sweep_params.gamma();
    let gc = diss.critical_coupling(&base);
    let dissipative_on = diss.kappa() > 0.0;
    let angle = cfg.angle;

    let reports = grid
        .par_iter()
        .map(|&f| -> Result<Vec<EstimationReport>, CliError> {
            let mut v = Vec::new();
            let ph = base.with_g(f)?;
            for which in Estimand::ALL {
                v.push(benchmarks::hamiltonian_report(&ph, &sweep_params, which, angle)?);
            }
            let mut ramsey = benchmarks::ramsey_report(base.omega(), v[0].time, 0.0)?;
            ramsey.g = f;
            v.push(ramsey);
            if dissipative_on {
                let pd = base.with_g(f * gc)?;
                for which in Estimand::ALL {
                    v.push(benchmarks::dissipative_report(&pd, &diss, which, angle)?);
                }
                let time = v.last().map(|r| r.time).unwrap_or(0.0);
                let mut r = benchmarks::ramsey_report(base.omega(), time, diss.spin_decay())?;
                r.g = f * gc;
                v.push(r);
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.context("benchmark"))?;
    let reports: Vec<EstimationReport> = reports.into_iter().flatten().collect();
    let table = benchmarks::reports_table(&reports);

    let hamiltonian = ProtocolSpec::Hamiltonian { params: base, gamma };
    let mut fits: Vec<(&str, Estimand, ScalingFit, f64)> = vec![
        (
            "critical-hamiltonian",
            Estimand::Omega,
            benchmarks::scaling_fit(&hamiltonian, Estimand::Omega, cfg.window, cfg.fit_points, Abscissa::Time, PhotonModel::Exact)?,
            benchmarks::hamiltonian_omega_prefactor(&base, gamma),
        ),
        (
            "critical-hamiltonian",
            Estimand::Omega0,
            benchmarks::scaling_fit(
                &hamiltonian,
                Estimand::Omega0,
                cfg.window,
                cfg.fit_points,
                Abscissa::PhotonsSquaredTimeSquared,
                PhotonModel::Exact,
            )?,
            f64::NAN,
        ),
    ];
    let mut crossings = vec![("critical-hamiltonian", benchmarks::crossover_time(&base, &sweep_params, 0.0)?)];
    if dissipative_on {
        let open = ProtocolSpec::Dissipative { params: base, diss };
        fits.push((
            "critical-dissipative",
            Estimand::Omega,
            benchmarks::scaling_fit(&open, Estimand::Omega, cfg.window, cfg.fit_points, Abscissa::Time, PhotonModel::Exact)?,
            dissipative::qfi_asymptote_omega_prefactor(&base, &diss),
        ));
        fits.push((
            "critical-dissipative",
            Estimand::Omega0,
            benchmarks::scaling_fit(&open, Estimand::Omega0, cfg.window, cfg.fit_points, Abscissa::PhotonsTime, PhotonModel::Exact)?,
            f64::NAN,
        ));
        crossings.push(("critical-dissipative", benchmarks::dissipative_crossover_time(&base, &diss)?));
    }
    let mut f = Table::new(&[
        "protocol",
        "parameter",
        "abscissa",
        "exponent",
        "exponent_stderr",
        "prefactor",
        "expected_prefactor",
        "r_squared",
        "g_min",
        "g_max",
        "points",
    ]);
    for (protocol, which, fit, expected) in &fits {
        f.push::<Cell>(vec![
            (*protocol).into(),
            which.name().into(),
            abscissa_name(fit.abscissa).into(),
            fit.exponent.into(),
            fit.exponent_stderr.into(),
            fit.prefactor.into(),
            (*expected).into(),
            fit.r_squared.into(),
            fit.window.0.into(),
            fit.window.1.into(),
            (fit.points as f64).into(),
        ]);
    }
    let mut c = Table::new(&["protocol", "crossover", "time"]);
    for (protocol, cross) in crossings {
        let (kind, time) = crossover_cells(cross);
        c.push::<Cell>(vec![protocol.into(), kind.into(), time.into()]);
    }
    let w = Writer::new(out, "benchmark", cfg)?;
    Ok(vec![
        w.write("benchmark_reports", &table, &[format!("angle = {angle}")])?,
        w.write("benchmark_fits", &f, &["window in units of the critical coupling".into()])?,
        w.write("benchmark_crossover", &c, &[])?,
    ])
}
