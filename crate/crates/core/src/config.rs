//! Flat `key = value` experiment configuration.
//!
//! One entry per line, `#` starts a comment. Every key has a default that
//! reproduces the iodine setup, so empty input is a complete config.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use crate::djalgo::{default_window, BooleanFunction, RunOptions, MAX_DOMAIN};
use crate::error::{Error, Result};
use crate::molecule::{build_model, MorseParams, VibronicModel};
use crate::pulse::PulseDesign;
use crate::spectral::Grid;
use crate::units::I2_REDUCED_MASS_AMU;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub x: MorseParams,
    pub b: MorseParams,
    pub reduced_mass: f64,
    pub grid_r_min: f64,
    pub grid_r_max: f64,
    pub grid_points: usize,
    pub n: usize,
    /// First B level of the window; `None` centres the window on w = 21.5.
    pub w_start: Option<usize>,
    pub v_target: usize,
    /// Stokes delays in units of τ_B.
    pub taus: Vec<f64>,
    pub tailored: bool,
    pub pulses: PulseDesign,
    /// Upper B level selected by the probe.
    pub probe_w: usize,
    /// Masks traced by `sweep` and drawn by `pulses`; empty means the
    /// constant function plus the alternating balanced one.
    pub masks: Vec<BooleanFunction>,
    pub sweep_tau_max: f64,
    pub sweep_points: usize,
    pub oracle_configs: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            x: MorseParams::iodine_x(),
            b: MorseParams::iodine_b(),
            reduced_mass: I2_REDUCED_MASS_AMU,
            grid_r_min: 2.0,
            grid_r_max: 6.5,
            grid_points: 512,
            n: 4,
            w_start: None,
            v_target: 4,
            taus: vec![0.0, 1.0, 2.0],
            tailored: false,
            pulses: PulseDesign::default(),
            probe_w: 22,
            masks: Vec::new(),
            sweep_tau_max: 2.5,
            sweep_points: 251,
            oracle_configs: 20,
            seed: 2002,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn num<T: std::str::FromStr>(value: &str, key: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("malformed value {value:?} for {key}"))
}

fn boolean(value: &str, key: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("malformed boolean {value:?} for {key}")),
    }
}

fn list(value: &str, key: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| num::<f64>(s, key))
        .collect()
}

impl ExperimentConfig {
    /// Applies one entry; errors are plain messages without line context.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "x_d_e" => self.x.d_e = num(value, key)?,
            "x_r_e" => self.x.r_e = num(value, key)?,
            "x_beta" => self.x.beta = num(value, key)?,
            "b_d_e" => self.b.d_e = num(value, key)?,
            "b_r_e" => self.b.r_e = num(value, key)?,
            "b_beta" => self.b.beta = num(value, key)?,
            "t_e" => self.b.t_e = num(value, key)?,
            "reduced_mass" => self.reduced_mass = num(value, key)?,
            "grid_r_min" => self.grid_r_min = num(value, key)?,
            "grid_r_max" => self.grid_r_max = num(value, key)?,
            "grid_points" => self.grid_points = num(value, key)?,
            "n" => {
                let n: usize = num(value, key)?;
                if !n.is_multiple_of(2) {
                    return Err(format!("N must be even (got {n})"));
                }
                self.n = n;
            }
            "w_start" => {
                self.w_start = if value == "auto" {
                    None
                } else {
                    Some(num(value, key)?)
                }
            }
            "v_target" => self.v_target = num(value, key)?,
            "tau" | "taus" => self.taus = list(value, key)?,
            "tailored" => self.tailored = boolean(value, key)?,
            "pump_width_fs" => self.pulses.pump_width = num(value, key)?,
            "tailored_pump_width_fs" => self.pulses.tailored_pump_width = num(value, key)?,
            "stokes_width_fs" => self.pulses.stokes_width = num(value, key)?,
            "probe_width_fs" => self.pulses.probe_width = num(value, key)?,
            "probe_w" => self.probe_w = num(value, key)?,
            "masks" => {
                self.masks = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| BooleanFunction::parse(s).map_err(|e| e.to_string()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "sweep_tau_max" => self.sweep_tau_max = num(value, key)?,
            "sweep_points" => self.sweep_points = num(value, key)?,
            "oracle_configs" => self.oracle_configs = num(value, key)?,
            "seed" => self.seed = num(value, key)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn window(&self) -> Result<RangeInclusive<usize>> {
        match self.w_start {
            Some(s) => Ok(s..=s + self.n - 1),
            None => default_window(self.n),
        }
    }

    /// Masks for `sweep`/`pulses`, defaulting to constant and alternating.
    pub fn sweep_masks(&self) -> Result<Vec<BooleanFunction>> {
        if !self.masks.is_empty() {
            return Ok(self.masks.clone());
        }
        Ok(vec![
            BooleanFunction::new(vec![false; self.n])?,
            BooleanFunction::new((0..self.n).map(|k| k % 2 == 1).collect())?,
        ])
    }

    /// Checks cross-field invariants that do not need the molecule.
    pub fn validate(&self) -> Result<()> {
        MorseParams::new(self.x.d_e, self.x.r_e, self.x.beta, self.x.t_e)?;
        MorseParams::new(self.b.d_e, self.b.r_e, self.b.beta, self.b.t_e)?;
        if !(self.reduced_mass > 0.0 && self.reduced_mass.is_finite()) {
            return Err(Error::Invalid("reduced_mass must be positive".into()));
        }
        Grid::new(self.grid_r_min, self.grid_r_max, self.grid_points)?;
        if self.n < 2 || !self.n.is_multiple_of(2) || self.n > MAX_DOMAIN {
            return Err(Error::Invalid(format!(
                "N must be even and in 2..={MAX_DOMAIN} (got {})",
                self.n
            )));
        }
        self.window()?;
        if self.taus.is_empty() || self.taus.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invalid(
                "tau list must be non-empty and finite".into(),
            ));
        }
        let p = &self.pulses;
        for (name, w) in [
            ("pump_width_fs", p.pump_width),
            ("tailored_pump_width_fs", p.tailored_pump_width),
            ("stokes_width_fs", p.stokes_width),
            ("probe_width_fs", p.probe_width),
        ] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive (got {w})")));
            }
        }
        if let Some(f) = self.masks.iter().find(|f| f.n() != self.n) {
            return Err(Error::Invalid(format!(
                "mask {f} has {} bits, N = {}",
                f.n(),
                self.n
            )));
        }
        if !(self.sweep_tau_max > 0.0 && self.sweep_tau_max.is_finite()) || self.sweep_points < 2 {
            return Err(Error::Invalid(
                "sweep needs tau_max > 0 and at least 2 points".into(),
            ));
        }
        if self.oracle_configs == 0 {
            return Err(Error::Invalid("oracle_configs must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_r_min, self.grid_r_max, self.grid_points)
    }

    pub fn build_model(&self) -> Result<VibronicModel> {
        build_model(self.x, self.b, self.reduced_mass, self.grid()?)
    }

    pub fn run_options(&self) -> Result<RunOptions> {
        Ok(RunOptions {
            w_range: self.window()?,
            v_target: self.v_target,
            tailored: self.tailored,
            pulses: self.pulses,
            envelopes: Default::default(),
        })
    }

    /// Every resolved key, one `key = value` per line, parseable again.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let fmt_list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let window = self.window().map(|r| *r.start());
        let masks = self
            .sweep_masks()
            .map(|m| {
                m.iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .unwrap_or_default();
        let entries: Vec<(&str, String)> = vec![
            ("x_d_e", self.x.d_e.to_string()),
            ("x_r_e", self.x.r_e.to_string()),
            ("x_beta", self.x.beta.to_string()),
            ("b_d_e", self.b.d_e.to_string()),
            ("b_r_e", self.b.r_e.to_string()),
            ("b_beta", self.b.beta.to_string()),
            ("t_e", self.b.t_e.to_string()),
            ("reduced_mass", self.reduced_mass.to_string()),
            ("grid_r_min", self.grid_r_min.to_string()),
            ("grid_r_max", self.grid_r_max.to_string()),
            ("grid_points", self.grid_points.to_string()),
            ("n", self.n.to_string()),
            (
                "w_start",
                window.map_or_else(|_| "auto".to_string(), |w| w.to_string()),
            ),
            ("v_target", self.v_target.to_string()),
            ("taus", fmt_list(&self.taus)),
            ("tailored", self.tailored.to_string()),
            ("pump_width_fs", self.pulses.pump_width.to_string()),
            (
                "tailored_pump_width_fs",
                self.pulses.tailored_pump_width.to_string(),
            ),
            ("stokes_width_fs", self.pulses.stokes_width.to_string()),
            ("probe_width_fs", self.pulses.probe_width.to_string()),
            ("probe_w", self.probe_w.to_string()),
            ("masks", masks),
            ("sweep_tau_max", self.sweep_tau_max.to_string()),
            ("sweep_points", self.sweep_points.to_string()),
            ("oracle_configs", self.oracle_configs.to_string()),
            ("seed", self.seed.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
        ];
        for (k, v) in entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Parses and validates config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected key=value, got {body:?}"),
        })?;
        cfg.set(key.trim(), value.trim())
            .map_err(|message| Error::Config { line, message })?;
    }
    cfg.validate()?;
    Ok(cfg)
}
