//! Deutsch-Jozsa instances encoded as Stokes phase masks.
//!
//! Bit `k` of a function selects the sign of the mask bin around
//! ν̃(w_k, v_target), with `w_k` ascending through the window. The mask
//! index of a function is `Σ_k bit_k 2^k`.

use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::dynamics::{apply_stokes, prepare_first_order, signal_magnitude, FirstOrderCoherence};
use crate::error::{Error, Result};
use crate::molecule::VibronicModel;
use crate::pulse::{design_pump, design_stokes, PulseDesign, PulseSpec};

pub const MAX_DOMAIN: usize = 16;

/// Level the window is centred on (between `CENTER_W - 1` and `CENTER_W`).
pub const CENTER_W: usize = 22;

/// X level carrying the computed coherence.
pub const V_TARGET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionClass {
    Constant,
    Balanced,
    Other,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::Constant => "constant",
            FunctionClass::Balanced => "balanced",
            FunctionClass::Other => "other",
        })
    }
}

/// f: {x_1..x_N} → {0,1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    bits: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_DOMAIN {
            return Err(Error::Invalid(format!(
                "domain size must be 1..={MAX_DOMAIN} (got {})",
                bits.len()
            )));
        }
        Ok(Self { bits })
    }

    /// Bit k of `index` is f(x_{k+1}).
    pub fn from_index(n: usize, index: u32) -> Result<Self> {
        if n == 0 || n > MAX_DOMAIN || (index as u64) >= (1u64 << n) {
            return Err(Error::Invalid(format!(
                "mask index {index} out of range for n={n}"
            )));
        }
        Self::new((0..n).map(|k| index >> k & 1 == 1).collect())
    }

    /// Parses a string of '0'/'1' characters, first character = x_1.
    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Invalid(format!(
                    "mask bits must be 0/1 (got {text:?})"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn index(&self) -> u32 {
        self.bits
            .iter()
            .enumerate()
            .map(|(k, &b)| (b as u32) << k)
            .sum()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn class(&self) -> FunctionClass {
        let ones = self.ones();
        if ones == 0 || ones == self.n() {
            FunctionClass::Constant
        } else if self.n().is_multiple_of(2) && 2 * ones == self.n() {
            FunctionClass::Balanced
        } else {
            FunctionClass::Other
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// S_N(f) = Σ_k (-1)^f(x_k).
    pub fn s_n(&self) -> i32 {
        self.n() as i32 - 2 * self.ones() as i32
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn s_n(f: &BooleanFunction) -> i32 {
    f.s_n()
}

/// All 2^n functions in mask-index order.
pub fn enumerate_functions(n: usize) -> Result<Vec<BooleanFunction>> {
    if n == 0 || n > MAX_DOMAIN {
        return Err(Error::Invalid(format!(
            "domain size must be 1..={MAX_DOMAIN} (got {n})"
        )));
    }
    (0..(1u32 << n))
        .map(|i| BooleanFunction::from_index(n, i))
        .collect()
}

/// The w window of `n` levels centred on w = 21.5.
pub fn default_window(n: usize) -> Result<RangeInclusive<usize>> {
    if n == 0 || !n.is_multiple_of(2) || n / 2 > CENTER_W {
        return Err(Error::Invalid(format!(
            "window size must be even and positive (got {n})"
        )));
    }
    Ok(CENTER_W - n / 2..=CENTER_W + n / 2 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Envelopes {
    #[default]
    Gaussian,
    /// Flat pump and Stokes spectra: the idealized limit.
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub w_range: RangeInclusive<usize>,
    pub v_target: usize,
    /// Equalize fc[w][0] and fc[w][v_target] across the window and use the
    /// short tailored pump.
    pub tailored: bool,
    pub pulses: PulseDesign,
    pub envelopes: Envelopes,
}

impl RunOptions {
    pub fn for_n(n: usize) -> Result<Self> {
        Ok(Self {
            w_range: default_window(n)?,
            v_target: V_TARGET,
            tailored: false,
            pulses: PulseDesign::default(),
            envelopes: Envelopes::Gaussian,
        })
    }

    pub fn tailored(mut self, on: bool) -> Self {
        self.tailored = on;
        self
    }

    pub fn flat(mut self) -> Self {
        self.envelopes = Envelopes::Flat;
        self
    }

    pub fn n(&self) -> usize {
        self.w_range.clone().count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DJOutcome {
    pub f: BooleanFunction,
    pub tau_fs: f64,
    pub tau_multiple: f64,
    /// A(f, τ), arbitrary units.
    pub a: f64,
    pub s_n: i32,
}

/// One molecule, window and pulse design, ready to evaluate any mask.
#[derive(Debug, Clone)]
pub struct Experiment {
    model: VibronicModel,
    options: RunOptions,
    pump: PulseSpec,
    first: FirstOrderCoherence,
    tau_b: f64,
}

impl Experiment {
    pub fn new(model: &VibronicModel, options: RunOptions) -> Result<Self> {
        model.check_window(&options.w_range)?;
        model.transition_wavenumber(*options.w_range.end(), options.v_target)?;
        let tau_b = model.tau_b();
        let model = if options.tailored {
            model.with_equalized_fc(options.w_range.clone(), &[0, options.v_target])?
        } else {
            model.clone()
        };
        let mut pump = design_pump(
            &model,
            options.w_range.clone(),
            options.pulses.pump_fwhm(options.tailored),
        )?;
        if options.envelopes == Envelopes::Flat {
            pump = pump.flattened();
        }
        let first = prepare_first_order(&model, &pump, options.w_range.clone())?;
        Ok(Self {
            model,
            options,
            pump,
            first,
            tau_b,
        })
    }

    pub fn model(&self) -> &VibronicModel {
        &self.model
    }

    pub fn options(&self) -> &RunOptions {
        &self.options
    }

    pub fn pump(&self) -> &PulseSpec {
        &self.pump
    }

    pub fn tau_b(&self) -> f64 {
        self.tau_b
    }

    /// Stokes pulse encoding `f`, arriving `tau_fs` after the pump.
    pub fn stokes(&self, f: &BooleanFunction, tau_fs: f64) -> Result<PulseSpec> {
        let mut s = design_stokes(
            &self.model,
            self.options.v_target,
            self.options.w_range.clone(),
            f.bits(),
            self.options.pulses.stokes_fwhm(),
        )?
        .with_delay(tau_fs);
        if self.options.envelopes == Envelopes::Flat {
            s = s.flattened();
        }
        Ok(s)
    }

    pub fn signal(&self, f: &BooleanFunction, tau_fs: f64) -> Result<f64> {
        let stokes = self.stokes(f, tau_fs)?;
        signal_magnitude(
            &apply_stokes(&self.model, &self.first, &stokes),
            self.options.v_target,
        )
    }

    pub fn outcome(&self, f: &BooleanFunction, tau_multiple: f64) -> Result<DJOutcome> {
        let tau_fs = tau_multiple * self.tau_b;
        Ok(DJOutcome {
            f: f.clone(),
            tau_fs,
            tau_multiple,
            a: self.signal(f, tau_fs)?,
            s_n: f.s_n(),
        })
    }

    /// Outcomes for every mask, in mask-index order.
    pub fn all_outcomes(&self, tau_multiple: f64) -> Result<Vec<DJOutcome>> {
        let fs = enumerate_functions(self.options.n())?;
        fs.par_iter()
            .map(|f| self.outcome(f, tau_multiple))
            .collect()
    }

    /// A(f, τ) on the given delays (fs).
    pub fn sweep(&self, f: &BooleanFunction, tau_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        tau_grid
            .iter()
            .map(|&t| {
                if !t.is_finite() {
                    return Err(Error::Invalid(format!("non-finite delay {t}")));
                }
                Ok((t, self.signal(f, t)?))
            })
            .collect()
    }

    pub fn metrics(&self, tau_multiple: f64) -> Result<FidelityMetrics> {
        let outcomes = self.all_outcomes(tau_multiple)?;
        Ok(FidelityMetrics {
            n: self.options.n(),
            tau_multiple,
            tailored: self.options.tailored,
            d: distinguishability(&outcomes)?,
            r: pearson_r(&outcomes)?,
        })
    }
}

/// Composes pump design, first-order preparation, mask-encoded Stokes at
/// τ = tau_multiple·τ_B and readout of |a_{v_target}|.
pub fn run_instance(
    model: &VibronicModel,
    f: &BooleanFunction,
    tau_multiple: f64,
    options: RunOptions,
) -> Result<DJOutcome> {
    if f.n() != options.n() {
        return Err(Error::Invalid(format!(
            "function of size {} on a window of {} levels",
            f.n(),
            options.n()
        )));
    }
    Experiment::new(model, options)?.outcome(f, tau_multiple)
}

pub fn sweep_delay(
    model: &VibronicModel,
    f: &BooleanFunction,
    tau_grid: &[f64],
    options: RunOptions,
) -> Result<Vec<(f64, f64)>> {
    Experiment::new(model, options)?.sweep(f, tau_grid)
}

/// D = 1 − max A(balanced) / A(constant).
pub fn distinguishability(outcomes: &[DJOutcome]) -> Result<f64> {
    let n = outcomes
        .first()
        .map(|o| o.f.n())
        .ok_or_else(|| Error::Invalid("no outcomes".into()))?;
    let constants: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.f.class() == FunctionClass::Constant)
        .map(|o| o.a)
        .collect();
    let balanced: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.f.class() == FunctionClass::Balanced)
        .map(|o| o.a)
        .collect();
    if constants.len() != 2 || balanced.len() != binomial(n, n / 2) {
        return Err(Error::Invalid(format!(
            "need both constant and all {} balanced functions (got {} and {})",
            binomial(n, n / 2),
            constants.len(),
            balanced.len()
        )));
    }
    let con = constants[0].max(constants[1]);
    if con == 0.0 {
        return Err(Error::Numerical(
            "constant-function signal vanishes; D undefined".into(),
        ));
    }
    if (constants[0] - constants[1]).abs() > 1e-9 * con {
        return Err(Error::Numerical(format!(
            "constant-function signals differ: {} vs {}",
            constants[0], constants[1]
        )));
    }
    let worst = balanced.iter().cloned().fold(0.0, f64::max);
    Ok(1.0 - worst / con)
}

/// Pearson correlation of A against |S_N(f)| over the outcomes.
pub fn pearson_r(outcomes: &[DJOutcome]) -> Result<f64> {
    let mut levels: Vec<i32> = outcomes.iter().map(|o| o.s_n.abs()).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 3 {
        return Err(Error::Invalid(format!(
            "Pearson r needs at least 3 distinct |S_N| values (got {})",
            levels.len()
        )));
    }
    let xs: Vec<f64> = outcomes.iter().map(|o| o.a).collect();
    let ys: Vec<f64> = outcomes.iter().map(|o| o.s_n.abs() as f64).collect();
    pearson(&xs, &ys)
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Numerical(
            "zero variance in Pearson correlation".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityMetrics {
    pub n: usize,
    pub tau_multiple: f64,
    pub tailored: bool,
    pub d: f64,
    pub r: f64,
}

impl FidelityMetrics {
    pub fn r_pct(&self) -> i64 {
        (100.0 * self.r).round() as i64
    }

    pub fn d_pct(&self) -> i64 {
        (100.0 * self.d).round() as i64
    }

    pub fn row_label(&self) -> String {
        format!("{}{}", self.n, if self.tailored { "t" } else { "" })
    }
}

/// Rows of the fidelity table: N = 4, 6, 8 and tailored 8.
pub const TABLE1_ROWS: [(usize, bool); 4] = [(4, false), (6, false), (8, false), (8, true)];

pub const TABLE1_TAUS: [f64; 3] = [0.0, 1.0, 2.0];

/// Fidelity grid over rows × delays (in τ_B), row-major.
pub fn table1(
    model: &VibronicModel,
    rows: &[(usize, bool)],
    tau_multiples: &[f64],
    pulses: PulseDesign,
) -> Result<Vec<FidelityMetrics>> {
    let mut out = Vec::with_capacity(rows.len() * tau_multiples.len());
    for &(n, tailored) in rows {
        let mut opts = RunOptions::for_n(n)?.tailored(tailored);
        opts.pulses = pulses;
        let exp = Experiment::new(model, opts)?;
        for &t in tau_multiples {
            out.push(exp.metrics(t)?);
        }
    }
    Ok(out)
}

/// Rows `mask_index, bits, class, s_n, tau_fs, tau_multiple, A`.
pub fn write_outcomes_csv<W: Write>(mut out: W, outcomes: &[DJOutcome]) -> Result<()> {
    writeln!(out, "mask_index,bits,class,s_n,tau_fs,tau_multiple,A")?;
    for o in outcomes {
        writeln!(
            out,
            "{},{},{},{},{:.6},{},{:.12e}",
            o.f.index(),
            o.f,
            o.f.class(),
            o.s_n,
            o.tau_fs,
            o.tau_multiple,
            o.a
        )?;
    }
    Ok(())
}

/// Rows `n, tau_multiple, tailored, r_pct, d_pct, r, d`.
pub fn write_metrics_csv<W: Write>(mut out: W, metrics: &[FidelityMetrics]) -> Result<()> {
    writeln!(out, "n,tau_multiple,tailored,r_pct,d_pct,r,d")?;
    for m in metrics {
        writeln!(
            out,
            "{},{},{},{},{},{:.9},{:.9}",
            m.n,
            m.tau_multiple,
            m.tailored,
            m.r_pct(),
            m.d_pct(),
            m.r,
            m.d
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::iodine_model;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn model() -> &'static VibronicModel {
        static M: OnceLock<VibronicModel> = OnceLock::new();
        M.get_or_init(|| iodine_model().unwrap())
    }

    fn outcome(bits: &str, a: f64) -> DJOutcome {
        let f = BooleanFunction::parse(bits).unwrap();
        DJOutcome {
            s_n: f.s_n(),
            f,
            tau_fs: 0.0,
            tau_multiple: 0.0,
            a,
        }
    }

    #[test]
    fn s_n_examples() {
        assert_eq!(BooleanFunction::parse("0000").unwrap().s_n(), 4);
        assert_eq!(BooleanFunction::parse("1000").unwrap().s_n(), 2);
        for bits in ["0011", "0101", "110100", "10101010"] {
            assert_eq!(s_n(&BooleanFunction::parse(bits).unwrap()), 0);
        }
    }

    #[test]
    fn enumeration_counts() {
        let count = |n| {
            let fs = enumerate_functions(n).unwrap();
            let c = |k| fs.iter().filter(|f| f.class() == k).count();
            (
                fs.len(),
                c(FunctionClass::Constant),
                c(FunctionClass::Balanced),
                c(FunctionClass::Other),
            )
        };
        assert_eq!(count(4), (16, 2, 6, 8));
        assert_eq!(count(2), (4, 2, 2, 0));
        assert_eq!(count(8).0, 256);
        assert_eq!(count(8).2, 70);
        let fs = enumerate_functions(6).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (i, f) in fs.iter().enumerate() {
            assert_eq!(f.index() as usize, i);
            assert!(seen.insert(f.clone()));
        }
        assert!(enumerate_functions(17).is_err());
    }

    #[test]
    fn parse_and_display() {
        let f = BooleanFunction::parse("0110").unwrap();
        assert_eq!(f.to_string(), "0110");
        assert_eq!(f.index(), 0b0110);
        assert_eq!(f.complement().to_string(), "1001");
        assert!(BooleanFunction::parse("01a").is_err());
        assert!(BooleanFunction::parse("").is_err());
        assert!(BooleanFunction::from_index(4, 16).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(default_window(4).unwrap(), 20..=23);
        assert_eq!(default_window(6).unwrap(), 19..=24);
        assert_eq!(default_window(8).unwrap(), 18..=25);
        assert!(default_window(5).is_err());
    }

    #[test]
    fn d_and_r_for_ideal_outcomes() {
        let fs = enumerate_functions(4).unwrap();
        let ideal: Vec<DJOutcome> = fs
            .iter()
            .map(|f| outcome(&f.to_string(), 0.7 * f.s_n().abs() as f64))
            .collect();
        assert_eq!(distinguishability(&ideal).unwrap(), 1.0);
        assert!((pearson_r(&ideal).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn metric_errors() {
        let fs = enumerate_functions(4).unwrap();
        let zero: Vec<DJOutcome> = fs.iter().map(|f| outcome(&f.to_string(), 0.0)).collect();
        assert!(distinguishability(&zero).is_err());
        assert!(pearson_r(&zero).is_err());
        assert!(distinguishability(&zero[..5]).is_err());
        let two: Vec<DJOutcome> = enumerate_functions(2)
            .unwrap()
            .iter()
            .map(|f| outcome(&f.to_string(), 1.0))
            .collect();
        assert!(pearson_r(&two).is_err());
        let mut lopsided: Vec<DJOutcome> =
            fs.iter().map(|f| outcome(&f.to_string(), 1.0)).collect();
        lopsided[0].a = 2.0;
        assert!(distinguishability(&lopsided).is_err());
    }

    #[test]
    fn pearson_matches_textbook_example() {
        // r for (1,2,3,4,5) vs (2,4,5,4,5) is 0.7745966692
        let r = pearson(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 5.0, 4.0, 5.0]).unwrap();
        assert!((r - 0.774_596_669_2).abs() < 1e-9);
    }

    #[test]
    fn balanced_signal_small_at_one_period() {
        let m = model();
        let exp = Experiment::new(m, RunOptions::for_n(4).unwrap()).unwrap();
        let con = exp
            .outcome(&BooleanFunction::parse("0000").unwrap(), 1.0)
            .unwrap()
            .a;
        for f in enumerate_functions(4).unwrap() {
            if f.class() == FunctionClass::Balanced {
                let a = exp.outcome(&f, 1.0).unwrap().a;
                assert!(a < 0.15 * con, "{f}: {a} vs {con}");
            }
        }
        // constant signal near a local maximum over τ
        let tb = exp.tau_b();
        let grid: Vec<f64> = (0..=40).map(|k| tb * (0.8 + 0.01 * k as f64)).collect();
        let trace = exp
            .sweep(&BooleanFunction::parse("0000").unwrap(), &grid)
            .unwrap();
        let peak = trace.iter().map(|x| x.1).fold(0.0, f64::max);
        assert!(con > 0.95 * peak);
    }

    #[test]
    fn tailored_flat_is_exact() {
        let m = model();
        let exp = Experiment::new(m, RunOptions::for_n(4).unwrap().tailored(true).flat()).unwrap();
        let unit = exp
            .outcome(&BooleanFunction::parse("0000").unwrap(), 0.0)
            .unwrap()
            .a
            / 4.0;
        for o in exp.all_outcomes(0.0).unwrap() {
            assert!((o.a - unit * o.s_n.abs() as f64).abs() < 1e-15, "{}", o.f);
        }
    }

    #[test]
    fn run_instance_checks_sizes() {
        let m = model();
        let f = BooleanFunction::parse("000000").unwrap();
        assert!(run_instance(m, &f, 1.0, RunOptions::for_n(4).unwrap()).is_err());
        let o = run_instance(m, &f, 1.0, RunOptions::for_n(6).unwrap()).unwrap();
        assert_eq!(o.s_n, 6);
        assert!(o.a > 0.0);
    }

    #[test]
    fn sweep_is_identical_for_complements() {
        let m = model();
        let f = BooleanFunction::parse("0100").unwrap();
        let taus: Vec<f64> = (0..30).map(|k| 25.0 * k as f64).collect();
        let a = sweep_delay(m, &f, &taus, RunOptions::for_n(4).unwrap()).unwrap();
        let b = sweep_delay(m, &f.complement(), &taus, RunOptions::for_n(4).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(sweep_delay(m, &f, &[f64::NAN], RunOptions::for_n(4).unwrap()).is_err());
    }

    #[test]
    fn csv_writers() {
        let o = vec![outcome("0101", 0.25)];
        let mut buf = Vec::new();
        write_outcomes_csv(&mut buf, &o).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "10,0101,balanced,0,0.000000,0,2.500000000000e-1"
        );
        let m = FidelityMetrics {
            n: 8,
            tau_multiple: 1.0,
            tailored: true,
            d: 0.894,
            r: 0.9849,
        };
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[m]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("8,1,true,98,89,"));
        assert_eq!(m.row_label(), "8t");
    }

    proptest! {
        #[test]
        fn metrics_are_scale_invariant(scale in 1e-6..1e6f64, seed in 0u32..1000) {
            let fs = enumerate_functions(4).unwrap();
            let outs: Vec<DJOutcome> = fs.iter().enumerate().map(|(i, f)| {
                let jitter = ((i as u32 * 7919 + seed) % 97) as f64 / 970.0;
                outcome(&f.to_string(), f.s_n().abs() as f64 + jitter + if f.class() == FunctionClass::Constant { 1.0 } else { 0.0 })
            }).collect();
            let scaled: Vec<DJOutcome> = outs.iter().map(|o| DJOutcome { a: o.a * scale, ..o.clone() }).collect();
            // constants must agree for D to be defined
            let mut outs = outs;
            let mut scaled = scaled;
            let c0 = outs[0].a; let last = outs.len() - 1;
            outs[last].a = c0; scaled[last].a = c0 * scale;
            let d0 = distinguishability(&outs).unwrap();
            let d1 = distinguishability(&scaled).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-12);
            prop_assert!((pearson_r(&outs).unwrap() - pearson_r(&scaled).unwrap()).abs() < 1e-12);
        }
    }
}
