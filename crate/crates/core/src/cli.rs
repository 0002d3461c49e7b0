//! Command-line reproductions. Every subcommand computes all of its outputs
//! in memory first; files are written only once everything has succeeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_config, ExperimentConfig};
use crate::djalgo::{
    distinguishability, pearson_r, write_metrics_csv, write_outcomes_csv, BooleanFunction,
    Experiment, FidelityMetrics, RunOptions, TABLE1_ROWS,
};
use crate::dynamics::{apply_stokes, cars_spectrum, prepare_first_order, time_domain_oracle};
use crate::error::{Error, Result};
use crate::molecule::{VibronicModel, TAU_B_LEVEL};
use crate::pulse::{design_probe, stokes_bin_edges, PulseSpec};
use crate::spectral::{morse_analytic_levels, morse_bound_count, EigenSolution};

/// Spectrum samples written per pulse.
const SPECTRUM_POINTS: usize = 1201;
/// Spectrum half-range in units of the pulse bandwidth FWHM.
const SPECTRUM_HALF_RANGE: f64 = 3.0;
/// Levels checked against the analytic Morse spectrum in the eigen summary.
const EIGEN_CHECK_LEVELS: usize = 30;
/// Largest oracle disagreement `oracle-check` accepts.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "cars-dj",
    version,
    about = "Deutsch-Jozsa interference in shaped-pulse CARS on iodine"
)]
pub struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides out_dir).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Domain size N (even).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Comma-separated Stokes delays in units of τ_B.
    #[arg(long, global = true, value_name = "LIST")]
    pub tau: Option<String>,
    /// Equalized Franck-Condon factors and short pump.
    #[arg(long, global = true)]
    pub tailored: bool,
    /// Mask bit string such as 0101; repeatable.
    #[arg(long = "mask", global = true, value_name = "BITS")]
    pub masks: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// X and B eigenvalues with analytic Morse deltas, plus wavefunctions.
    Eigen,
    /// Franck-Condon matrix, transition wavenumbers and window scores.
    Fc,
    /// Pump, masked Stokes and probe spectra.
    Pulses,
    /// Signal against Stokes delay for the selected masks.
    Sweep,
    /// Fidelity metrics for N = 4, 6, 8 and tailored 8 at each delay.
    Table1,
    /// Frequency-domain signal against explicit time integration.
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Fc => "fc",
            Command::Pulses => "pulses",
            Command::Sweep => "sweep",
            Command::Table1 => "table1",
            Command::OracleCheck => "oracle-check",
        }
    }
}

/// Files produced by one command, in canonical order, plus a text summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

impl Report {
    fn add(&mut self, name: impl Into<String>, header: &str, body: Vec<u8>) -> Result<()> {
        let body = String::from_utf8(body).map_err(|e| Error::Numerical(e.to_string()))?;
        self.files.push((name.into(), format!("{header}{body}")));
        Ok(())
    }

    /// Writes every file under `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, text) in &self.files {
            let path = dir.join(name);
            fs::write(&path, text)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Loads the config file (if any) and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    let flag = |e: String, name: &str| Error::Invalid(format!("--{name}: {e}"));
    if let Some(n) = cli.n {
        cfg.set("n", &n.to_string()).map_err(|e| flag(e, "n"))?;
    }
    if let Some(t) = &cli.tau {
        cfg.set("taus", t).map_err(|e| flag(e, "tau"))?;
    }
    if cli.tailored {
        cfg.tailored = true;
    }
    if !cli.masks.is_empty() {
        cfg.set("masks", &cli.masks.join(","))
            .map_err(|e| flag(e, "mask"))?;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `# key = value` lines for the resolved config, prefixed by the command.
pub fn config_header(command: Command, cfg: &ExperimentConfig) -> String {
    let mut h = format!("# cars-dj {}\n", command.name());
    for line in cfg.echo().lines() {
        let _ = writeln!(h, "# {line}");
    }
    h
}

/// Runs one subcommand entirely in memory.
pub fn run_command(command: Command, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let header = config_header(command, cfg);
    let model = cfg.build_model()?;
    match command {
        Command::Eigen => eigen(cfg, &model, &header),
        Command::Fc => fc(cfg, &model, &header),
        Command::Pulses => pulses(cfg, &model, &header),
        Command::Sweep => sweep(cfg, &model, &header),
        Command::Table1 => table1(cfg, &model, &header),
        Command::OracleCheck => oracle_check(cfg, &model, &header),
    }
}

/// Parses arguments, runs, writes files and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = resolve_config(&cli).and_then(|cfg| {
        let report = run_command(cli.command, &cfg)?;
        let written = report.write_to(&cfg.out_dir)?;
        Ok((report, written))
    });
    match result {
        Ok((report, written)) => {
            print!("{}", report.summary);
            for p in written {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn level_rows(sol: &EigenSolution, analytic: &[f64]) -> (Vec<u8>, f64) {
    let mut out = String::from("level,energy_cm1,analytic_cm1,delta_cm1,rel_delta\n");
    let mut worst: f64 = 0.0;
    for (k, e) in sol.energies.iter().enumerate() {
        match analytic.get(k) {
            Some(&a) => {
                let rel = (e - a).abs() / a.abs();
                if k < EIGEN_CHECK_LEVELS {
                    worst = worst.max(rel);
                }
                let _ = writeln!(out, "{k},{e:.10},{a:.10},{:.6e},{rel:.6e}", e - a);
            }
            None => {
                let _ = writeln!(out, "{k},{e:.10},,,");
            }
        }
    }
    (out.into_bytes(), worst)
}

fn eigen(cfg: &ExperimentConfig, model: &VibronicModel, header: &str) -> Result<Report> {
    let mut report = Report::default();
    for (tag, sol, params) in [("x", &model.x, &cfg.x), ("b", &model.b, &cfg.b)] {
        let n = sol
            .n_bound()
            .min(morse_bound_count(params, cfg.reduced_mass));
        let analytic = morse_analytic_levels(params, cfg.reduced_mass, n)?;
        let (rows, worst) = level_rows(sol, &analytic);
        report.add(format!("levels_{tag}.csv"), header, rows)?;
        let mut psi = Vec::new();
        sol.write_csv(&mut psi)?;
        report.add(format!("wavefunctions_{tag}.csv"), header, psi)?;
        let _ = writeln!(
            report.summary,
            "{}: {} levels retained, max relative deviation from Morse over first {}: {worst:.3e}",
            tag.to_uppercase(),
            sol.n_bound(),
            EIGEN_CHECK_LEVELS.min(n)
        );
    }
    let w = TAU_B_LEVEL;
    if w + 2 < model.n_b() {
        let _ = writeln!(
            report.summary,
            "B spacings E[{}]-E[{w}] = {:.3} cm-1, E[{}]-E[{}] = {:.3} cm-1, tau_B = {:.3} fs",
            w + 1,
            model.b.energies[w + 1] - model.b.energies[w],
            w + 2,
            w + 1,
            model.b.energies[w + 2] - model.b.energies[w + 1],
            model.tau_b()
        );
    }
    Ok(report)
}

fn fc(cfg: &ExperimentConfig, model: &VibronicModel, header: &str) -> Result<Report> {
    let mut report = Report::default();
    let mut table = Vec::new();
    model.write_fc_csv(&mut table)?;
    report.add("fc.csv", header, table)?;

    let v = cfg.v_target;
    let window = cfg.window()?;
    let scores = model.fc_window_score(v, window.clone())?;
    let mut rows = format!("w,fc_w0,fc_w{v},score,nu_w0_cm1,nu_w{v}_cm1\n");
    for &(w, s) in &scores {
        let _ = writeln!(
            rows,
            "{w},{:.12e},{:.12e},{s:.12e},{:.6},{:.6}",
            model.fc(w, 0),
            model.fc(w, v),
            model.transition_wavenumber(w, 0)?,
            model.transition_wavenumber(w, v)?
        );
    }
    report.add("fc_window.csv", header, rows.into_bytes())?;
    if let Some(&(w, s)) = scores.iter().max_by(|a, b| a.1.total_cmp(&b.1)) {
        let _ = writeln!(
            report.summary,
            "window {window:?}: max |fc[w][0] fc[w][{v}]| = {s:.4e} at w = {w}"
        );
    }
    Ok(report)
}

fn spectrum(pulse: &PulseSpec) -> Result<Vec<u8>> {
    let half = SPECTRUM_HALF_RANGE * pulse.bandwidth_fwhm();
    let mut out = Vec::new();
    pulse.write_spectrum_csv(
        &mut out,
        pulse.center - half,
        pulse.center + half,
        SPECTRUM_POINTS,
    )?;
    Ok(out)
}

fn experiment(cfg: &ExperimentConfig, model: &VibronicModel) -> Result<Experiment> {
    Experiment::new(model, cfg.run_options()?)
}

fn pulses(cfg: &ExperimentConfig, model: &VibronicModel, header: &str) -> Result<Report> {
    let exp = experiment(cfg, model)?;
    let mut report = Report::default();
    report.add("pump.csv", header, spectrum(exp.pump())?)?;

    let window = cfg.window()?;
    let edges = stokes_bin_edges(exp.model(), cfg.v_target, window.clone())?;
    let mut bins = format!("bin,w,nu_w{}_cm1,lower_cm1,upper_cm1\n", cfg.v_target);
    for (k, w) in window.clone().enumerate() {
        let _ = writeln!(
            bins,
            "{k},{w},{:.6},{:.6},{:.6}",
            exp.model().transition_wavenumber(w, cfg.v_target)?,
            edges[k],
            edges[k + 1]
        );
    }
    report.add("stokes_bins.csv", header, bins.into_bytes())?;

    for f in cfg.sweep_masks()? {
        report.add(
            format!("stokes_{f}.csv"),
            header,
            spectrum(&exp.stokes(&f, 0.0)?)?,
        )?;
    }
    let probe = design_probe(
        exp.model(),
        cfg.probe_w,
        cfg.v_target,
        cfg.pulses.probe_fwhm(),
    )?;
    report.add("probe.csv", header, spectrum(&probe)?)?;
    let _ = writeln!(
        report.summary,
        "pump {:.2} cm-1 ({:.2} fs FWHM), stokes bandwidth {:.2} cm-1, probe {:.2} cm-1",
        exp.pump().center,
        exp.pump().duration_fwhm().unwrap_or(f64::INFINITY),
        exp.stokes(&cfg.sweep_masks()?[0], 0.0)?.bandwidth_fwhm(),
        probe.center
    );
    Ok(report)
}

fn sweep(cfg: &ExperimentConfig, model: &VibronicModel, header: &str) -> Result<Report> {
    let exp = experiment(cfg, model)?;
    let tau_b = exp.tau_b();
    let masks = cfg.sweep_masks()?;
    let steps = cfg.sweep_points - 1;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| cfg.sweep_tau_max * tau_b * i as f64 / steps as f64)
        .collect();
    let traces = masks
        .iter()
        .map(|f| exp.sweep(f, &grid))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = String::from("tau_fs,tau_multiple");
    for f in &masks {
        let _ = write!(rows, ",A_{f}");
    }
    rows.push('\n');
    for (i, t) in grid.iter().enumerate() {
        let _ = write!(rows, "{t:.6},{:.6}", t / tau_b);
        for tr in &traces {
            let _ = write!(rows, ",{:.12e}", tr[i].1);
        }
        rows.push('\n');
    }
    let mut report = Report::default();
    report.add("sweep.csv", header, rows.into_bytes())?;
    let _ = writeln!(
        report.summary,
        "tau_B = {tau_b:.3} fs, {} delays",
        grid.len()
    );
    for (f, tr) in masks.iter().zip(&traces) {
        let peaks: Vec<String> = local_maxima(tr)
            .into_iter()
            .map(|(t, _)| format!("{:.3}", t / tau_b))
            .collect();
        let _ = writeln!(
            report.summary,
            "{f} ({}): maxima at tau/tau_B = [{}]",
            f.class(),
            peaks.join(", ")
        );
    }
    Ok(report)
}

/// Interior and end-point local maxima of a sampled trace.
pub fn local_maxima(trace: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = trace.len();
    (0..n)
        .filter(|&i| {
            let left = i == 0 || trace[i].1 > trace[i - 1].1;
            let right = i + 1 == n || trace[i].1 >= trace[i + 1].1;
            left && right
        })
        .map(|i| trace[i])
        .collect()
}

fn table1(cfg: &ExperimentConfig, model: &VibronicModel, header: &str) -> Result<Report> {
    let mut report = Report::default();
    let mut metrics: Vec<FidelityMetrics> = Vec::new();
    let mut raw = Vec::new();
    for &(n, tailored) in &TABLE1_ROWS {
        let mut opts = RunOptions::for_n(n)?.tailored(tailored);
        opts.pulses = cfg.pulses;
        opts.v_target = cfg.v_target;
        let exp = Experiment::new(model, opts)?;
        let mut outcomes = Vec::new();
        for &t in &cfg.taus {
            let o = exp.all_outcomes(t)?;
            metrics.push(FidelityMetrics {
                n,
                tau_multiple: t,
                tailored,
                d: distinguishability(&o)?,
                r: pearson_r(&o)?,
            });
            outcomes.extend(o);
        }
        let mut body = Vec::new();
        write_outcomes_csv(&mut body, &outcomes)?;
        raw.push((
            format!("outcomes_n{n}{}.csv", if tailored { "t" } else { "" }),
            body,
        ));
    }
    let mut body = Vec::new();
    write_metrics_csv(&mut body, &metrics)?;
    report.add("table1.csv", header, body)?;
    for (name, body) in raw {
        report.add(name, header, body)?;
    }

    let mut line = String::from("N  ");
    for t in &cfg.taus {
        let _ = write!(line, " | tau={t}tau_B r/D");
    }
    let _ = writeln!(report.summary, "{line}");
    for row in metrics.chunks(cfg.taus.len()) {
        let mut line = format!("{:<3}", row[0].row_label());
        for m in row {
            let _ = write!(line, " | {:>7}/{:<7}", m.r_pct(), m.d_pct());
        }
        let _ = writeln!(report.summary, "{line}");
    }
    Ok(report)
}

/// One randomized configuration compared by `oracle-check`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub n: usize,
    pub tailored: bool,
    pub stokes_width: f64,
    pub f: BooleanFunction,
    pub tau_multiple: f64,
}

/// Deterministic random cases drawn from `seed`.
pub fn oracle_cases(count: usize, seed: u64) -> Result<Vec<OracleCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = 2 * rng.gen_range(1..=4);
            let index = rng.gen_range(0..1u32 << n);
            Ok(OracleCase {
                n,
                tailored: rng.gen_bool(0.25),
                stokes_width: rng.gen_range(30.0..80.0),
                f: BooleanFunction::from_index(n, index)?,
                tau_multiple: rng.gen_range(0.0..2.5),
            })
        })
        .collect()
}

/// Frequency- and time-domain magnitudes for one case.
pub fn oracle_compare(
    model: &VibronicModel,
    base: &ExperimentConfig,
    case: &OracleCase,
) -> Result<(f64, f64)> {
    let mut opts = RunOptions::for_n(case.n)?.tailored(case.tailored);
    opts.pulses = base.pulses;
    opts.pulses.stokes_width = case.stokes_width;
    opts.v_target = base.v_target;
    let exp = Experiment::new(model, opts.clone())?;
    let tau = case.tau_multiple * exp.tau_b();
    let stokes = exp.stokes(&case.f, tau)?;
    let freq = exp.signal(&case.f, tau)?;
    let time = time_domain_oracle(
        exp.model(),
        exp.pump(),
        &stokes,
        opts.w_range,
        opts.v_target,
    )?;
    Ok((freq, time))
}

fn oracle_check(cfg: &ExperimentConfig, model: &VibronicModel, header: &str) -> Result<Report> {
    let cases = oracle_cases(cfg.oracle_configs, cfg.seed)?;
    let mut rows =
        String::from("case,n,tailored,stokes_width_fs,bits,tau_multiple,A_freq,A_time,rel_dev\n");
    let mut worst: f64 = 0.0;
    for (i, c) in cases.iter().enumerate() {
        let (freq, time) = oracle_compare(model, cfg, c)?;
        let rel = relative_deviation(freq, time);
        worst = worst.max(rel);
        let _ = writeln!(
            rows,
            "{i},{},{},{:.6},{},{:.6},{freq:.12e},{time:.12e},{rel:.3e}",
            c.n, c.tailored, c.stokes_width, c.f, c.tau_multiple
        );
    }
    // CARS readout of the configured run: line/A ratio is mask independent
    let exp = experiment(cfg, model)?;
    let probe = design_probe(
        exp.model(),
        cfg.probe_w,
        cfg.v_target,
        cfg.pulses.probe_fwhm(),
    )?;
    let tau = cfg.taus[0] * exp.tau_b();
    let f = &cfg.sweep_masks()?[0];
    let second = apply_stokes(
        exp.model(),
        &prepare_first_order(exp.model(), exp.pump(), cfg.window()?)?,
        &exp.stokes(f, tau)?,
    );
    let line = cars_spectrum(exp.model(), &second, &probe)
        .line(cfg.probe_w)
        .map(|l| l.amplitude.norm())
        .unwrap_or(0.0);

    let mut report = Report::default();
    report.add("oracle_check.csv", header, rows.into_bytes())?;
    let _ = writeln!(
        report.summary,
        "{} configurations, max relative deviation {worst:.3e} (tolerance {ORACLE_TOLERANCE:e})",
        cases.len()
    );
    let _ = writeln!(
        report.summary,
        "CARS line w={} for {f}: |amplitude| = {line:.6e}, A = {:.6e}",
        cfg.probe_w,
        exp.signal(f, tau)?
    );
    if worst >= ORACLE_TOLERANCE {
        return Err(Error::Numerical(format!(
            "frequency and time domain disagree: max relative deviation {worst:e}"
        )));
    }
    Ok(report)
}

fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
