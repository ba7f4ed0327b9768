//! Mode pipelines: equilibrium -> spectrum -> evolution, plus sweeps.

use std::path::Path;

use interphase::equilibrium::{equilibrium_energy, stability_number};
use interphase::evolution::{fit_rate, initial_state, simulate_mode0, EvolutionOptions, InitKind};
use interphase::ntd::NtdContext;
use interphase::spectrum::{classify, ClassifyOptions, DispersionSample, StabilityReport};
use interphase::{EquilibriumState, RadialField};
use rayon::prelude::*;

use crate::config::{equilibrium_of, Diagnostic, InitSpec, Mode, RunConfig};
use crate::report::{write_csv, Cell, Report};
use crate::CliError;

pub fn run(mode: Mode, cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    requirements(mode, cfg)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(out.display().to_string(), e))?;
    let report = match mode {
        Mode::Equilibrium => equilibrium_mode(cfg)?,
        Mode::Classify => classify_mode(cfg, out)?,
        Mode::DispersionSweep => dispersion_mode(cfg, out)?,
        Mode::Evolve => evolve_mode(cfg, out)?,
        Mode::Sweep => sweep_mode(cfg, out)?,
    };
    report.write(out).map_err(|e| CliError::Io(out.display().to_string(), e))?;
    Ok(report)
}

fn requirements(mode: Mode, cfg: &RunConfig) -> Result<(), CliError> {
    let mut d = Vec::new();
    let need_radial = matches!(mode, Mode::DispersionSweep | Mode::Evolve);
    if need_radial && cfg.m != 1 {
        d.push(Diagnostic {
            key: "m".into(),
            message: format!("mode {} needs a single concentric inclusion (m = 1)", mode.as_str()),
        });
    }
    if mode == Mode::Evolve && cfg.evolution.is_none() {
        d.push(Diagnostic {
            key: "evolution".into(),
            message: "mode evolve needs an [evolution] section".into(),
        });
    }
    if mode == Mode::Sweep && cfg.sweep.is_none() {
        d.push(Diagnostic {
            key: "sweep".into(),
            message: "mode sweep needs a [sweep] section".into(),
        });
    }
    if d.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(d))
    }
}

fn equilibrium_entries(r: &mut Report, cfg: &RunConfig, eq: &EquilibriumState, warnings: &[String]) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let g = &eq.geometry;
    let sec = "equilibrium";
    r.push(sec, "n", g.n);
    r.push(sec, "m", g.m);
    r.push(sec, "R_outer", g.r_outer);
    r.push(sec, "sigma", eq.sigma);
    r.push(sec, "theta_star", eq.theta_star);
    r.push(sec, "R_star", g.r_star);
    r.push(sec, "psi_jump", eq.psi_jump);
    r.push(sec, "pressure_jump", eq.pressure_jump);
    r.push(sec, "latent_heat", eq.l_star);
    r.push(sec, "kappa_1", eq.kappa_star_1);
    r.push(sec, "kappa_2", eq.kappa_star_2);
    r.push(sec, "d_1", eq.d_star_1);
    r.push(sec, "d_2", eq.d_star_2);
    r.push(sec, "mu_1", eq.mu_star_1);
    r.push(sec, "mu_2", eq.mu_star_2);
    r.push(sec, "gibbs_thomson_residual", eq.gibbs_thomson_residual());
    r.push(sec, "energy", equilibrium_energy(eq, &pair));
    let sn = stability_number(eq);
    r.push(sec, "s", sn.s);
    r.push(sec, "curvature_term", sn.curvature_term);
    r.push(sec, "latent_term", sn.latent_term);
    r.push(sec, "warnings", warnings.len());
    for (i, w) in warnings.iter().enumerate() {
        r.push(sec, &format!("warning_{}", i + 1), w.as_str());
    }
    Ok(())
}

fn equilibrium_mode(cfg: &RunConfig) -> Result<Report, CliError> {
    let (eq, warnings) = equilibrium_of(cfg)?;
    let mut r = Report::default();
    r.push("run", "mode", Mode::Equilibrium.as_str());
    equilibrium_entries(&mut r, cfg, &eq, &warnings)?;
    Ok(r)
}

fn condition_text(report: &StabilityReport) -> &'static str {
    use interphase::Classification::*;
    match report.classification {
        DegenerateSZero => "s = 0 (within tolerance)",
        DegenerateLZero if report.s == 0.0 => "s = 0",
        _ if report.s < 0.0 => "s < 0",
        _ => "s > 0",
    }
}

fn stability_entries(r: &mut Report, rep: &StabilityReport) {
    let sec = "stability";
    r.push(sec, "classification", rep.classification.as_str());
    r.push(sec, "s", rep.s);
    r.push(sec, "stability_condition", condition_text(rep));
    r.push(sec, "phi_prime", rep.phi_prime);
    r.push(sec, "phi_prime_error", rep.phi_prime_error);
    r.push(sec, "lambda0", rep.lambda0);
    r.push(sec, "positive_count", rep.positive_count);
    r.push(sec, "kernel_dim", rep.kernel_dim);
}

fn dispersion_rows(samples: &[DispersionSample]) -> Vec<Vec<Cell>> {
    samples
        .iter()
        .map(|d| vec![Cell::Int(d.l as i64), Cell::Num(d.lambda), Cell::Num(d.a_l), Cell::Num(d.t_l), Cell::Num(d.b_l)])
        .collect()
}

const DISPERSION_HEADER: [&str; 5] = ["l", "lambda", "a_l", "t_l", "b_l"];

fn csv(out: &Path, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
    let path = out.join(name);
    write_csv(&path, header, rows).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn classify_mode(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let (eq, warnings) = equilibrium_of(cfg)?;
    let pair = cfg.pair()?;
    let opts = ClassifyOptions {
        order: cfg.order,
        l_max: cfg.dispersion.l_max,
        lambdas: cfg.dispersion.lambdas.clone(),
    };
    let rep = classify(&eq, &pair, &opts)?;
    let mut r = Report::default();
    r.push("run", "mode", Mode::Classify.as_str());
    equilibrium_entries(&mut r, cfg, &eq, &warnings)?;
    stability_entries(&mut r, &rep);
    if !rep.diagnostics.is_empty() {
        csv(out, "dispersion.csv", &DISPERSION_HEADER, &dispersion_rows(&rep.diagnostics))?;
        r.push("files", "dispersion", "dispersion.csv");
    }
    Ok(r)
}

struct GridPoint {
    l: usize,
    lambda: f64,
    heat: Option<f64>,
    stokes: f64,
    heat_form_error: f64,
    stokes_form_error: f64,
    dispersion: DispersionSample,
}

fn grid_point(ctx: &NtdContext, l: usize, lambda: f64) -> interphase::Result<GridPoint> {
    let (heat, heat_form_error) = if l == 0 && lambda == 0.0 {
        (None, 0.0)
    } else {
        let h = ctx.heat(l, lambda)?;
        (Some(h.value), ctx.heat_form(&h).relative_error())
    };
    let s = ctx.stokes(l, lambda)?;
    Ok(GridPoint {
        l,
        lambda,
        heat,
        stokes: s.value,
        heat_form_error,
        stokes_form_error: ctx.stokes_form(&s).relative_error(),
        dispersion: ctx.dispersion(l, lambda)?,
    })
}

fn dispersion_mode(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let (eq, warnings) = equilibrium_of(cfg)?;
    let ctx = NtdContext::new(&eq, cfg.order)?;
    let spec = &cfg.dispersion;
    let jobs: Vec<(usize, f64)> = (0..=spec.l_max)
        .flat_map(|l| spec.lambdas.iter().map(move |&lam| (l, lam)))
        .collect();
    let points = jobs
        .par_iter()
        .map(|&(l, lam)| grid_point(&ctx, l, lam))
        .collect::<interphase::Result<Vec<_>>>()?;

    let ntd_rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|p| {
            vec![
                Cell::Int(p.l as i64),
                Cell::Num(p.lambda),
                p.heat.map_or(Cell::Empty, Cell::Num),
                Cell::Num(p.stokes),
            ]
        })
        .collect();
    csv(out, "ntd.csv", &["l", "lambda", "N_heat", "N_stokes"], &ntd_rows)?;
    let disp: Vec<DispersionSample> = points.iter().map(|p| p.dispersion).collect();
    csv(out, "dispersion.csv", &DISPERSION_HEADER, &dispersion_rows(&disp))?;

    let mut r = Report::default();
    r.push("run", "mode", Mode::DispersionSweep.as_str());
    equilibrium_entries(&mut r, cfg, &eq, &warnings)?;
    let sec = "dispersion";
    r.push(sec, "samples", points.len());
    r.push(sec, "l_max", spec.l_max);
    r.push(
        sec,
        "max_heat_form_error",
        points.iter().map(|p| p.heat_form_error).fold(0.0, f64::max),
    );
    r.push(
        sec,
        "max_stokes_form_error",
        points.iter().map(|p| p.stokes_form_error).fold(0.0, f64::max),
    );
    let min_pos = disp
        .iter()
        .filter(|d| d.lambda > 0.0 && d.l != 1)
        .map(|d| d.b_l)
        .fold(f64::INFINITY, f64::min);
    r.push(sec, "min_b_l_positive_lambda_excluding_l1", if min_pos.is_finite() { Some(min_pos) } else { None });
    r.push(sec, "b0_zero_limit", ctx.b0_zero_limit()?);
    r.push("files", "ntd", "ntd.csv");
    r.push("files", "dispersion", "dispersion.csv");
    Ok(r)
}

/// Reads `r, theta` pairs (optional header, `#` comments) and interpolates
/// them linearly onto the mesh.
fn read_custom_field(path: &Path, ctx: &NtdContext) -> Result<RadialField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let bad = |msg: String| {
        CliError::Validation(vec![Diagnostic {
            key: "evolution.init_file".into(),
            message: format!("{}: {msg}", path.display()),
        }])
    };
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (cols.len() == 2)
            .then(|| Some((cols[0].parse::<f64>().ok()?, cols[1].parse::<f64>().ok()?)))
            .flatten();
        match parsed {
            Some(p) => pts.push(p),
            None if pts.is_empty() && i == 0 => continue,
            None => return Err(bad(format!("line {}: expected `r, theta`", i + 1))),
        }
    }
    if pts.len() < 2 || pts.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(bad("need at least two rows with strictly increasing r".into()));
    }
    let interp = |r: f64| {
        let k = pts.partition_point(|p| p.0 <= r).clamp(1, pts.len() - 1);
        let ((r0, v0), (r1, v1)) = (pts[k - 1], pts[k]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    };
    Ok(RadialField::from_fn(&ctx.mesh, 0, interp))
}

fn evolve_mode(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let spec = cfg.evolution.as_ref().expect("checked in requirements");
    let (eq, warnings) = equilibrium_of(cfg)?;
    let ctx = NtdContext::new(&eq, cfg.order)?;
    let kind = match &spec.init {
        InitSpec::Bump => InitKind::Bump,
        InitSpec::Eigen => InitKind::Eigen,
        InitSpec::CustomFile(p) => InitKind::Custom(read_custom_field(p, &ctx)?),
    };
    let init = initial_state(&ctx, &kind)?;
    let traj = simulate_mode0(
        &ctx,
        &init,
        EvolutionOptions {
            t_end: spec.t_end,
            dt: spec.dt,
        },
    )?;
    let rows: Vec<Vec<Cell>> = traj
        .samples
        .iter()
        .map(|s| vec![Cell::Num(s.t), Cell::Num(s.h), Cell::Num(s.theta_interface), Cell::Num(s.q)])
        .collect();
    csv(out, "trajectory.csv", &["t", "h", "theta_interface", "Q"], &rows)?;

    let mut r = Report::default();
    r.push("run", "mode", Mode::Evolve.as_str());
    equilibrium_entries(&mut r, cfg, &eq, &warnings)?;
    let sec = "evolution";
    r.push(
        sec,
        "init",
        match spec.init {
            InitSpec::Bump => "bump",
            InitSpec::Eigen => "eigen",
            InitSpec::CustomFile(_) => "custom-file",
        },
    );
    r.push(sec, "T_end", spec.t_end);
    r.push(sec, "dt", spec.dt);
    r.push(sec, "steps", traj.samples.len() - 1);
    r.push(sec, "q_drift", traj.q_drift);
    r.push(sec, "max_constraint_drift", traj.max_constraint_drift);
    r.push(sec, "max_step_error_estimate", traj.max_error_estimate);
    match fit_rate(&traj) {
        Ok(fit) => {
            r.push(sec, "fitted_rate", fit.rate);
            r.push(sec, "fit_residual", fit.residual);
            r.push(sec, "fit_samples", fit.used);
        }
        Err(e) => {
            r.push(sec, "fitted_rate", None::<f64>);
            r.push(sec, "fit_error", e.to_string());
        }
    }
    let lambda0 = ctx.find_unstable_eigenvalue()?.lambda0();
    r.push(sec, "lambda0", lambda0);
    if let (Some(l0), Some(crate::report::Value::Num(rate))) = (lambda0, r.get(sec, "fitted_rate").cloned()) {
        r.push(sec, "rate_relative_difference", (rate - l0).abs() / l0);
    }
    r.push("files", "trajectory", "trajectory.csv");
    Ok(r)
}

fn sweep_mode(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let spec = cfg.sweep.as_ref().expect("checked in requirements");
    let values = spec.values();
    let opts = ClassifyOptions {
        order: cfg.order,
        l_max: 0,
        lambdas: Vec::new(),
    };
    let results: Vec<Result<StabilityReport, interphase::Error>> = values
        .par_iter()
        .map(|&v| {
            let c = cfg.with_param(spec.parameter, v);
            let (eq, _) = equilibrium_of(&c)?;
            classify(&eq, &c.pair()?, &opts)
        })
        .collect();

    let mut rows = Vec::with_capacity(values.len());
    let mut failures = 0usize;
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for (v, res) in values.iter().zip(&results) {
        match res {
            Ok(rep) => {
                *counts.entry(rep.classification.as_str()).or_default() += 1;
                rows.push(vec![
                    Cell::Num(*v),
                    Cell::Num(rep.s),
                    rep.phi_prime.map_or(Cell::Empty, Cell::Num),
                    Cell::Text(rep.classification.as_str().into()),
                    rep.lambda0.map_or(Cell::Empty, Cell::Num),
                ]);
            }
            Err(e) => {
                failures += 1;
                log::warn!("{} = {v}: {e}", spec.parameter.as_str());
                rows.push(vec![
                    Cell::Num(*v),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(format!("error:{}", e.name())),
                    Cell::Empty,
                ]);
            }
        }
    }
    let param = spec.parameter.as_str();
    csv(out, "sweep.csv", &[param, "s", "phi_prime", "classification", "lambda0"], &rows)?;

    let mut r = Report::default();
    r.push("run", "mode", Mode::Sweep.as_str());
    r.push("sweep", "parameter", param);
    r.push("sweep", "from", spec.range.0);
    r.push("sweep", "to", spec.range.1);
    r.push("sweep", "count", spec.count);
    r.push("sweep", "failures", failures);
    for (class, n) in counts {
        r.push("sweep", class, n);
    }
    r.push("files", "sweep", "sweep.csv");
    Ok(r)
}
