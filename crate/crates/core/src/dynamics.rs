//! Perturbative coherence transfer along the single CARS pathway.
//!
//! The bra stays on `(X,0)` throughout. The pump prepares
//! `c_w |B,w⟩⟨X,0|`, the Stokes pulse dumps it to `a_v |X,v⟩⟨X,0|` and the
//! probe lifts that to `b_w' |B,w'⟩⟨X,0|`, which radiates on `(B,w') → (X,0)`.
//! Amplitudes are first, second and third order in the fields with unit
//! transition dipole. Pulse ordering is not enforced: each interaction is the
//! full-time Fourier integral, so (P,S) and (S,P) sequences add coherently.
//!
//! Amplitudes are in the interaction picture. The Stokes delay phase
//! `exp(-i 2πc ν̃(w,v) τ)` equals the B-state evolution `exp(-i 2πc ν̃(w,0) τ)`
//! up to the v-dependent factor `exp(+i 2πc (E_v - E_0) τ)`, so `|a_v|` is
//! the same in either frame.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::molecule::VibronicModel;
use crate::pulse::PulseSpec;
use crate::units::angular;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Σ_w c_w |B,w⟩⟨X,0|` over a contiguous window.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderCoherence {
    pub w_start: usize,
    pub c: Vec<Complex64>,
    /// Pump arrival time, fs.
    pub prepared_at: f64,
}

impl FirstOrderCoherence {
    pub fn levels(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.c
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.w_start + k, c))
    }
}

/// `Σ_v a_v |X,v⟩⟨X,0|` over every retained X level.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderCoherence {
    pub a: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarsLine {
    /// Upper level of the emitting transition.
    pub w: usize,
    /// Emission wavenumber ν̃(w, 0), cm⁻¹.
    pub nu: f64,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarsSpectrum {
    pub lines: Vec<CarsLine>,
}

impl CarsSpectrum {
    pub fn line(&self, w: usize) -> Option<&CarsLine> {
        self.lines.iter().find(|l| l.w == w)
    }

    /// Line with the largest |amplitude|.
    pub fn strongest(&self) -> Option<&CarsLine> {
        self.lines
            .iter()
            .max_by(|a, b| a.amplitude.norm().total_cmp(&b.amplitude.norm()))
    }
}

/// `c_w = i fc[w][0] E_P(ν̃(w,0))` for w in the window.
pub fn prepare_first_order(
    model: &VibronicModel,
    pump: &PulseSpec,
    w_range: RangeInclusive<usize>,
) -> Result<FirstOrderCoherence> {
    model.check_window(&w_range)?;
    let w_start = *w_range.start();
    let c = w_range
        .map(|w| I * model.fc(w, 0) * pump.spectral_amplitude(model.nu(w, 0)))
        .collect();
    Ok(FirstOrderCoherence {
        w_start,
        c,
        prepared_at: pump.delay,
    })
}

/// `a_v = Σ_w fc[w][v] conj(E_S(ν̃(w,v))) c_w`, with the Stokes delay τ
/// carried by `stokes.delay` (pump at t = 0). Summation is ascending in w.
pub fn apply_stokes(
    model: &VibronicModel,
    first: &FirstOrderCoherence,
    stokes: &PulseSpec,
) -> SecondOrderCoherence {
    let a = (0..model.n_x())
        .map(|v| {
            first
                .levels()
                .map(|(w, c)| model.fc(w, v) * stokes.spectral_amplitude(model.nu(w, v)).conj() * c)
                .sum()
        })
        .collect();
    SecondOrderCoherence { a }
}

/// `A = |a_{v_target}|`; free evolution after the pulses only rotates its
/// phase at the (X,0)–(X,v_target) beat.
pub fn signal_magnitude(second: &SecondOrderCoherence, v_target: usize) -> Result<f64> {
    second
        .a
        .get(v_target)
        .map(|a| a.norm())
        .ok_or(Error::LevelOutOfRange {
            what: "second-order coherence",
            index: v_target,
            available: second.a.len(),
        })
}

/// Third-order amplitudes from a probe and the emitted line strengths.
pub fn cars_spectrum(
    model: &VibronicModel,
    second: &SecondOrderCoherence,
    probe: &PulseSpec,
) -> CarsSpectrum {
    let lines = (0..model.n_b())
        .map(|w| {
            let b: Complex64 = second
                .a
                .iter()
                .enumerate()
                .map(|(v, &a)| model.fc(w, v) * probe.spectral_amplitude(model.nu(w, v)) * a)
                .sum();
            CarsLine {
                w,
                nu: model.nu(w, 0),
                amplitude: b * model.fc(w, 0),
            }
        })
        .collect();
    CarsSpectrum { lines }
}

/// Settings for the explicit time-domain integration.
#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    /// Coarse step, fs; the result is taken at half this step.
    pub step: f64,
    /// Half-width of the integration window in units of σ_t.
    pub half_width_sigmas: f64,
    /// Allowed relative change between step and step/2.
    pub convergence_tol: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            step: 0.25,
            half_width_sigmas: 8.0,
            convergence_tol: 1e-8,
        }
    }
}

/// `∫ E(t) exp(iωt) dt` by the trapezoid rule for an unmasked Gaussian pulse,
/// integrated in the carrier frame around its arrival time.
fn field_transform(
    pulse: &PulseSpec,
    nu: f64,
    step: f64,
    half_width_sigmas: f64,
) -> Result<Complex64> {
    let sigma = pulse.sigma_t().ok_or_else(|| {
        Error::Invalid("time-domain oracle needs pulses of finite duration".into())
    })?;
    let half = half_width_sigmas * sigma;
    let n = (2.0 * half / step).ceil() as usize;
    let h = 2.0 * half / n as f64;
    let detune = angular(nu - pulse.center);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let s = -half + i as f64 * h;
        let wgt = if i == 0 || i == n { 0.5 } else { 1.0 };
        let env = pulse.field_envelope(pulse.delay + s).unwrap_or(0.0);
        acc += Complex64::from_polar(wgt * env, detune * s);
    }
    let mask = pulse
        .mask
        .as_ref()
        .map_or(Complex64::new(1.0, 0.0), |m| m.factor_at(nu));
    Ok(acc * h * Complex64::from_polar(1.0, angular(nu) * pulse.delay) * mask)
}

fn time_domain_at(
    model: &VibronicModel,
    pump: &PulseSpec,
    stokes: &PulseSpec,
    w_range: RangeInclusive<usize>,
    v_target: usize,
    step: f64,
    half_width_sigmas: f64,
) -> Result<Complex64> {
    let mut a = Complex64::new(0.0, 0.0);
    for w in w_range {
        // the unordered double integral factorizes into the two transforms
        let absorb = field_transform(pump, model.nu(w, 0), step, half_width_sigmas)?;
        let dump = field_transform(stokes, model.nu(w, v_target), step, half_width_sigmas)?.conj();
        a += model.fc(w, v_target) * dump * I * model.fc(w, 0) * absorb;
    }
    Ok(a)
}

/// Second-order amplitude `a_{v_target}` from explicit time integration of
/// the pulse fields against the transition phase factors `exp(iω t)`. Each
/// spectral mask acts as a per-transition filter. Fails if halving the step
/// moves the result by more than the tolerance.
pub fn time_domain_amplitude(
    model: &VibronicModel,
    pump: &PulseSpec,
    stokes: &PulseSpec,
    w_range: RangeInclusive<usize>,
    v_target: usize,
    settings: OracleSettings,
) -> Result<Complex64> {
    model.check_window(&w_range)?;
    model.transition_wavenumber(*w_range.start(), v_target)?;
    if settings.half_width_sigmas < 5.0 {
        return Err(Error::Invalid(
            "oracle window must cover at least ±5σ_t".into(),
        ));
    }
    if !(settings.step > 0.0 && settings.step <= 0.25) {
        return Err(Error::Invalid("oracle step must be in (0, 0.25] fs".into()));
    }
    let coarse = time_domain_at(
        model,
        pump,
        stokes,
        w_range.clone(),
        v_target,
        settings.step,
        settings.half_width_sigmas,
    )?;
    let fine = time_domain_at(
        model,
        pump,
        stokes,
        w_range,
        v_target,
        0.5 * settings.step,
        settings.half_width_sigmas,
    )?;
    let scale = fine.norm().max(f64::MIN_POSITIVE);
    let change = (fine - coarse).norm() / scale;
    if fine.norm() > 0.0 && change > settings.convergence_tol {
        return Err(Error::Numerical(format!(
            "time-domain integral not converged: relative change {change:e} on halving the step"
        )));
    }
    Ok(fine)
}

/// `|a_{v_target}|` from [`time_domain_amplitude`] with default settings.
pub fn time_domain_oracle(
    model: &VibronicModel,
    pump: &PulseSpec,
    stokes: &PulseSpec,
    w_range: RangeInclusive<usize>,
    v_target: usize,
) -> Result<f64> {
    time_domain_amplitude(
        model,
        pump,
        stokes,
        w_range,
        v_target,
        OracleSettings::default(),
    )
    .map(|a| a.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::iodine_model;
    use crate::pulse::{design_pump, design_stokes, PulseDesign};
    use std::sync::OnceLock;

    fn model() -> &'static VibronicModel {
        static M: OnceLock<VibronicModel> = OnceLock::new();
        M.get_or_init(|| iodine_model().unwrap())
    }

    #[test]
    fn zero_pump_gives_zero_coherence() {
        let m = model();
        let p = design_pump(m, 20..=23, 30.0).unwrap().with_amplitude(0.0);
        let c = prepare_first_order(m, &p, 20..=23).unwrap();
        assert!(c.c.iter().all(|x| x.norm() == 0.0));
        let s = design_stokes(m, 4, 20..=23, &[false; 4], 30.0).unwrap();
        let a = apply_stokes(m, &c, &s);
        assert_eq!(signal_magnitude(&a, 4).unwrap(), 0.0);
        let oracle = time_domain_oracle(m, &p, &s, 20..=23, 4).unwrap();
        assert_eq!(oracle, 0.0);
    }

    #[test]
    fn flat_pump_tracks_fc() {
        let m = model();
        let p = design_pump(m, 20..=23, 30.0).unwrap().flattened();
        let c = prepare_first_order(m, &p, 20..=23).unwrap();
        for (w, cw) in c.levels() {
            assert!((cw - I * m.fc(w, 0)).norm() < 1e-15);
        }
    }

    #[test]
    fn designed_pump_gives_comparable_amplitudes() {
        let m = model();
        for fwhm in [PulseDesign::default().pump_fwhm(false), 50.0] {
            let p = design_pump(m, 20..=23, fwhm).unwrap();
            let c = prepare_first_order(m, &p, 20..=23).unwrap();
            let mags: Vec<f64> = c.c.iter().map(|x| x.norm()).collect();
            let hi = mags.iter().cloned().fold(0.0, f64::max);
            let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(hi / lo <= 4.0, "{mags:?}");
        }
    }

    #[test]
    fn single_channel_transfer() {
        let m = model();
        let p = PulseSpec::flat(m.nu(22, 0));
        let s = PulseSpec::flat(m.nu(22, 4));
        let c = prepare_first_order(m, &p, 22..=22).unwrap();
        let a = apply_stokes(m, &c, &s);
        let want = (m.fc(22, 4) * m.fc(22, 0)).abs();
        assert!((signal_magnitude(&a, 4).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn uniform_model_cancels_balanced_mask() {
        let m = model().with_equalized_fc(20..=23, &[0, 4]).unwrap();
        let p = design_pump(&m, 20..=23, 30.0).unwrap().flattened();
        let c = prepare_first_order(&m, &p, 20..=23).unwrap();
        let single = (m.fc(20, 0) * m.fc(20, 4)).abs();
        let bal = design_stokes(&m, 4, 20..=23, &[false, true, true, false], 30.0)
            .unwrap()
            .flattened();
        assert_eq!(
            signal_magnitude(&apply_stokes(&m, &c, &bal), 4).unwrap(),
            0.0
        );
        let con = design_stokes(&m, 4, 20..=23, &[false; 4], 30.0)
            .unwrap()
            .flattened();
        let a = signal_magnitude(&apply_stokes(&m, &c, &con), 4).unwrap();
        assert!((a - 4.0 * single).abs() < 1e-15);
    }

    #[test]
    fn signal_magnitude_is_modulus() {
        let s = SecondOrderCoherence {
            a: vec![Complex64::new(0.0, 0.0), Complex64::new(3.0, 4.0)],
        };
        assert_eq!(signal_magnitude(&s, 1).unwrap(), 5.0);
        assert_eq!(signal_magnitude(&s, 0).unwrap(), 0.0);
        assert!(signal_magnitude(&s, 2).is_err());
    }

    #[test]
    fn oracle_matches_frequency_domain() {
        let m = model();
        let tau = 1.3 * m.tau_b();
        let bits = [false, true, true, false, true, false];
        let p = design_pump(m, 19..=24, 29.4).unwrap();
        let s = design_stokes(m, 4, 19..=24, &bits, 29.4)
            .unwrap()
            .with_delay(tau);
        let first = prepare_first_order(m, &p, 19..=24).unwrap();
        let a = apply_stokes(m, &first, &s).a[4];
        let td = time_domain_amplitude(m, &p, &s, 19..=24, 4, OracleSettings::default()).unwrap();
        assert!((td - a).norm() / a.norm() < 1e-9, "{td} vs {a}");
    }

    #[test]
    fn oracle_rejects_flat_and_narrow_windows() {
        let m = model();
        let p = PulseSpec::flat(m.nu(22, 0));
        let s = design_stokes(m, 4, 20..=23, &[false; 4], 30.0).unwrap();
        assert!(time_domain_oracle(m, &p, &s, 20..=23, 4).is_err());
        let p = design_pump(m, 20..=23, 30.0).unwrap();
        let narrow = OracleSettings {
            half_width_sigmas: 3.0,
            ..Default::default()
        };
        assert!(time_domain_amplitude(m, &p, &s, 20..=23, 4, narrow).is_err());
    }

    #[test]
    fn oracle_flags_unconverged_steps() {
        let m = model();
        let p = design_pump(m, 20..=23, 0.1).unwrap();
        let s = design_stokes(m, 4, 20..=23, &[false; 4], 0.1).unwrap();
        let err = time_domain_amplitude(m, &p, &s, 20..=23, 4, OracleSettings::default());
        assert!(matches!(err, Err(Error::Numerical(_))), "{err:?}");
    }

    #[test]
    fn probe_isolates_the_22_line() {
        let m = model();
        let d = PulseDesign::default();
        let p = design_pump(m, 20..=23, d.pump_fwhm(false)).unwrap();
        let s = design_stokes(m, 4, 20..=23, &[false; 4], d.stokes_fwhm())
            .unwrap()
            .with_delay(m.tau_b());
        let second = apply_stokes(m, &prepare_first_order(m, &p, 20..=23).unwrap(), &s);
        let probe = crate::pulse::design_probe(m, 22, 4, d.probe_fwhm()).unwrap();
        let spec = cars_spectrum(m, &second, &probe);
        let l22 = spec.line(22).unwrap();
        assert_eq!(l22.nu, m.nu(22, 0));
        // only v = 4 reaches w' = 22 through the narrow probe
        let direct =
            m.fc(22, 4) * probe.spectral_amplitude(m.nu(22, 4)) * second.a[4] * m.fc(22, 0);
        assert!((l22.amplitude - direct).norm() < 1e-6 * direct.norm());

        let zero = SecondOrderCoherence {
            a: vec![Complex64::new(0.0, 0.0); m.n_x()],
        };
        assert!(cars_spectrum(m, &zero, &probe)
            .lines
            .iter()
            .all(|l| l.amplitude.norm() == 0.0));
    }
}
