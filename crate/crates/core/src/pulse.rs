//! Transform-limited Gaussian pulse spectra with binned masks.
//!
//! A pulse with intensity FWHM `Δt` has field envelope
//! `E(t) ∝ exp(-(t - t₀)²/(2σ_t²))`, `σ_t = Δt/(2√ln2)`, and spectral
//! amplitude `A exp(-(σ_t ω)²/2)` with `ω = 2πc(ν̃ - ν̃₀)`. A delay `t₀`
//! multiplies the spectrum by `exp(+i 2πc ν̃ t₀)`.

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::molecule::VibronicModel;
use crate::units::{angular, C_CM_PER_FS};

/// Piecewise-constant spectral multiplier over contiguous bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMask {
    bin_edges: Vec<f64>,
    factors: Vec<Complex64>,
    outside_factor: Complex64,
}

impl SpectralMask {
    pub fn new(bin_edges: Vec<f64>, factors: Vec<Complex64>) -> Result<Self> {
        if factors.is_empty() || bin_edges.len() != factors.len() + 1 {
            return Err(Error::Invalid(format!(
                "mask needs n+1 edges for n bins (got {} edges, {} factors)",
                bin_edges.len(),
                factors.len()
            )));
        }
        if bin_edges.iter().any(|e| !e.is_finite()) || bin_edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "mask edges must be finite and strictly ascending".into(),
            ));
        }
        if factors.iter().any(|f| !f.is_finite()) {
            return Err(Error::Invalid("mask factors must be finite".into()));
        }
        Ok(Self {
            bin_edges,
            factors,
            outside_factor: Complex64::new(1.0, 0.0),
        })
    }

    /// ±1 phase mask: bin `k` gets `(-1)^bits[k]`.
    pub fn from_bits(bin_edges: Vec<f64>, bits: &[bool]) -> Result<Self> {
        let factors = bits
            .iter()
            .map(|&b| Complex64::new(if b { -1.0 } else { 1.0 }, 0.0))
            .collect();
        Self::new(bin_edges, factors)
    }

    pub fn with_outside_factor(mut self, f: Complex64) -> Self {
        self.outside_factor = f;
        self
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn factors(&self) -> &[Complex64] {
        &self.factors
    }

    pub fn n_bins(&self) -> usize {
        self.factors.len()
    }

    /// Bin index holding `nu`; bins are half-open `[lo, hi)`.
    pub fn bin_of(&self, nu: f64) -> Option<usize> {
        let first = self.bin_edges[0];
        let last = *self.bin_edges.last().unwrap();
        if !(nu >= first && nu < last) {
            return None;
        }
        let k = self.bin_edges.partition_point(|&e| e <= nu);
        Some(k - 1)
    }

    pub fn factor_at(&self, nu: f64) -> Complex64 {
        self.bin_of(nu)
            .map_or(self.outside_factor, |k| self.factors[k])
    }

    pub fn is_phase_encoding(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.im == 0.0 && f.re.abs() == 1.0)
    }

    /// Product of two masks on identical bins.
    pub fn compose(&self, other: &SpectralMask) -> Result<SpectralMask> {
        if self.bin_edges != other.bin_edges {
            return Err(Error::Invalid("masks have different bins".into()));
        }
        Ok(SpectralMask {
            bin_edges: self.bin_edges.clone(),
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a * b)
                .collect(),
            outside_factor: self.outside_factor * other.outside_factor,
        })
    }
}

/// Spectral envelope shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// Transform-limited Gaussian with the given intensity FWHM (fs).
    Gaussian { duration_fwhm: f64 },
    /// Frequency-independent spectrum, the zero-duration limit.
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    /// Carrier wavenumber, cm⁻¹.
    pub center: f64,
    pub envelope: Envelope,
    pub amplitude: f64,
    /// Arrival time, fs.
    pub delay: f64,
    pub mask: Option<SpectralMask>,
}

impl PulseSpec {
    pub fn gaussian(center: f64, duration_fwhm: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) {
            return Err(Error::Invalid(format!(
                "pulse center must be positive (got {center})"
            )));
        }
        if !(duration_fwhm > 0.0 && duration_fwhm.is_finite()) {
            return Err(Error::Invalid(format!(
                "pulse duration must be positive (got {duration_fwhm})"
            )));
        }
        Ok(Self {
            center,
            envelope: Envelope::Gaussian { duration_fwhm },
            amplitude: 1.0,
            delay: 0.0,
            mask: None,
        })
    }

    pub fn flat(center: f64) -> Self {
        Self {
            center,
            envelope: Envelope::Flat,
            amplitude: 1.0,
            delay: 0.0,
            mask: None,
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_delay(mut self, delay: f64) -> Self {
        self.delay = delay;
        self
    }

    pub fn with_mask(mut self, mask: SpectralMask) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn flattened(mut self) -> Self {
        self.envelope = Envelope::Flat;
        self
    }

    pub fn duration_fwhm(&self) -> Option<f64> {
        match self.envelope {
            Envelope::Gaussian { duration_fwhm } => Some(duration_fwhm),
            Envelope::Flat => None,
        }
    }

    /// Field envelope RMS width σ_t (fs).
    pub fn sigma_t(&self) -> Option<f64> {
        self.duration_fwhm().map(|d| d / (2.0 * LN_2.sqrt()))
    }

    /// Spectral intensity FWHM in cm⁻¹.
    pub fn bandwidth_fwhm(&self) -> f64 {
        match self.sigma_t() {
            Some(s) => 2.0 * LN_2.sqrt() / s / (2.0 * PI * C_CM_PER_FS),
            None => f64::INFINITY,
        }
    }

    /// Real Gaussian envelope at `nu`, peak value `amplitude`.
    pub fn envelope_at(&self, nu: f64) -> f64 {
        match self.sigma_t() {
            Some(s) => {
                let x = s * angular(nu - self.center);
                self.amplitude * (-0.5 * x * x).exp()
            }
            None => self.amplitude,
        }
    }

    /// Envelope times mask factor, without the delay phase.
    pub fn shaped_amplitude(&self, nu: f64) -> Complex64 {
        let env = Complex64::new(self.envelope_at(nu), 0.0);
        match &self.mask {
            Some(m) => env * m.factor_at(nu),
            None => env,
        }
    }

    /// Complex spectral amplitude including the delay phase.
    pub fn spectral_amplitude(&self, nu: f64) -> Complex64 {
        self.shaped_amplitude(nu) * Complex64::from_polar(1.0, angular(nu) * self.delay)
    }

    /// Unmasked time-domain field in the frame rotating at the carrier:
    /// `E(t) exp(+iω₀(t - t₀))`. `None` for a flat spectrum.
    pub fn field_envelope(&self, t: f64) -> Option<f64> {
        self.sigma_t().map(|s| {
            let x = (t - self.delay) / s;
            self.amplitude / ((2.0 * PI).sqrt() * s) * (-0.5 * x * x).exp()
        })
    }

    /// Rows `nu_cm1, re_amp, im_amp` on a uniform wavenumber grid.
    pub fn write_spectrum_csv<W: Write>(
        &self,
        mut out: W,
        nu_min: f64,
        nu_max: f64,
        n: usize,
    ) -> Result<()> {
        writeln!(out, "nu_cm1,re_amp,im_amp")?;
        let n = n.max(2);
        for i in 0..n {
            let nu = nu_min + (nu_max - nu_min) * i as f64 / (n - 1) as f64;
            let a = self.spectral_amplitude(nu);
            writeln!(out, "{nu:.6},{:.12e},{:.12e}", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Intensity FWHM of a Gaussian whose 1/e² intensity full width is `width`.
pub fn fwhm_from_full_width_1e2(width: f64) -> f64 {
    width * (LN_2 / 2.0).sqrt()
}

/// Nominal pulse durations, quoted as 1/e² intensity full widths (fs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseDesign {
    pub pump_width: f64,
    pub tailored_pump_width: f64,
    pub stokes_width: f64,
    pub probe_width: f64,
}

impl Default for PulseDesign {
    fn default() -> Self {
        Self {
            pump_width: 50.0,
            tailored_pump_width: 10.0,
            stokes_width: 50.0,
            probe_width: 1000.0,
        }
    }
}

impl PulseDesign {
    pub fn pump_fwhm(&self, tailored: bool) -> f64 {
        fwhm_from_full_width_1e2(if tailored {
            self.tailored_pump_width
        } else {
            self.pump_width
        })
    }

    pub fn stokes_fwhm(&self) -> f64 {
        fwhm_from_full_width_1e2(self.stokes_width)
    }

    pub fn probe_fwhm(&self) -> f64 {
        fwhm_from_full_width_1e2(self.probe_width)
    }
}

/// Pump centred on the mean of ν̃(w, 0) over the window.
pub fn design_pump(
    model: &VibronicModel,
    w_range: RangeInclusive<usize>,
    duration_fwhm: f64,
) -> Result<PulseSpec> {
    model.check_window(&w_range)?;
    let nus: Vec<f64> = w_range.map(|w| model.nu(w, 0)).collect();
    let center = nus.iter().sum::<f64>() / nus.len() as f64;
    PulseSpec::gaussian(center, duration_fwhm)
}

/// Mask bins around each ν̃(w, v_target), edges at midpoints, outermost
/// edges mirrored. Bin `k` belongs to the k-th level of the window.
pub fn stokes_bin_edges(
    model: &VibronicModel,
    v_target: usize,
    w_range: RangeInclusive<usize>,
) -> Result<Vec<f64>> {
    model.check_window(&w_range)?;
    model.transition_wavenumber(*w_range.start(), v_target)?;
    let nus: Vec<f64> = w_range.clone().map(|w| model.nu(w, v_target)).collect();
    if nus.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Invalid(format!(
            "transition wavenumbers to v={v_target} are not distinct over w={}..={}",
            w_range.start(),
            w_range.end()
        )));
    }
    let mut edges = Vec::with_capacity(nus.len() + 1);
    if nus.len() == 1 {
        let w = *w_range.start();
        let half = if w + 1 < model.n_b() {
            0.5 * (model.nu(w + 1, v_target) - nus[0])
        } else {
            0.5 * (nus[0] - model.nu(w - 1, v_target))
        };
        edges.push(nus[0] - half);
        edges.push(nus[0] + half);
        return Ok(edges);
    }
    edges.push(nus[0] - 0.5 * (nus[1] - nus[0]));
    for p in nus.windows(2) {
        edges.push(0.5 * (p[0] + p[1]));
    }
    let n = nus.len();
    edges.push(nus[n - 1] + 0.5 * (nus[n - 1] - nus[n - 2]));
    Ok(edges)
}

/// Stokes pulse centred on the mean of ν̃(w, v_target), carrying the ±1
/// phase mask for `f_bits`.
pub fn design_stokes(
    model: &VibronicModel,
    v_target: usize,
    w_range: RangeInclusive<usize>,
    f_bits: &[bool],
    duration_fwhm: f64,
) -> Result<PulseSpec> {
    let n = w_range.clone().count();
    if f_bits.len() != n {
        return Err(Error::Invalid(format!(
            "{} mask bits for a window of {n} levels",
            f_bits.len()
        )));
    }
    let edges = stokes_bin_edges(model, v_target, w_range.clone())?;
    let center = w_range.map(|w| model.nu(w, v_target)).sum::<f64>() / n as f64;
    Ok(PulseSpec::gaussian(center, duration_fwhm)?
        .with_mask(SpectralMask::from_bits(edges, f_bits)?))
}

/// Narrow probe centred on the (X, v_target) → (B, w) transition.
pub fn design_probe(
    model: &VibronicModel,
    w: usize,
    v_target: usize,
    duration_fwhm: f64,
) -> Result<PulseSpec> {
    PulseSpec::gaussian(model.transition_wavenumber(w, v_target)?, duration_fwhm)
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

    #[test]
    fn peak_amplitude_at_center() {
        let p = PulseSpec::gaussian(18000.0, 50.0)
            .unwrap()
            .with_amplitude(2.5);
        assert_eq!(p.spectral_amplitude(18000.0), Complex64::new(2.5, 0.0));
    }

    #[test]
    fn bandwidth_of_50fs_pulse() {
        // Δt·Δf = 2 ln2/π ≈ 0.441 for a Gaussian
        let p = PulseSpec::gaussian(18000.0, 50.0).unwrap();
        let oracle = 2.0 * LN_2 / PI / 50.0 / C_CM_PER_FS;
        assert!((p.bandwidth_fwhm() - oracle).abs() < 1e-9);
        assert!((p.bandwidth_fwhm() - 294.0).abs() < 1.0);
        // half-maximum of |A|² lands at ±FWHM/2
        let half = p
            .spectral_amplitude(18000.0 + 0.5 * p.bandwidth_fwhm())
            .norm_sqr();
        assert!((half - 0.5).abs() < 1e-12);
        let probe = PulseSpec::gaussian(18000.0, 1000.0).unwrap();
        assert!((probe.bandwidth_fwhm() - 14.7).abs() < 0.1);
    }

    #[test]
    fn masked_bin_negates() {
        let mask = SpectralMask::from_bits(vec![100.0, 200.0, 300.0], &[false, true]).unwrap();
        let p = PulseSpec::gaussian(220.0, 100.0).unwrap();
        let m = p.clone().with_mask(mask);
        assert_eq!(m.spectral_amplitude(250.0), -p.spectral_amplitude(250.0));
        assert_eq!(m.spectral_amplitude(150.0), p.spectral_amplitude(150.0));
        assert_eq!(m.spectral_amplitude(350.0), p.spectral_amplitude(350.0));
    }

    #[test]
    fn mask_validation() {
        assert!(SpectralMask::from_bits(vec![1.0, 1.0], &[true]).is_err());
        assert!(SpectralMask::from_bits(vec![1.0, 2.0], &[true, false]).is_err());
        assert!(SpectralMask::new(vec![1.0, 2.0], vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        let m = SpectralMask::from_bits(vec![1.0, 2.0, 3.0], &[true, false]).unwrap();
        assert!(m.is_phase_encoding());
        assert_eq!(m.bin_of(2.0), Some(1));
        assert_eq!(m.bin_of(3.0), None);
        let amp = SpectralMask::new(vec![1.0, 2.0], vec![Complex64::new(0.5, 0.0)]).unwrap();
        assert!(!amp.is_phase_encoding());
    }

    #[test]
    fn pulse_validation() {
        assert!(PulseSpec::gaussian(-1.0, 50.0).is_err());
        assert!(PulseSpec::gaussian(100.0, 0.0).is_err());
    }

    #[test]
    fn pump_covers_window() {
        let m = model();
        let p = design_pump(m, 20..=23, fwhm_from_full_width_1e2(50.0)).unwrap();
        for w in 20..=23 {
            let a = p.spectral_amplitude(m.nu(w, 0)).norm();
            assert!(a > 0.5, "w={w}: {a}");
        }
        let lit = design_pump(m, 20..=23, 50.0).unwrap();
        for w in 20..=23 {
            assert!(lit.spectral_amplitude(m.nu(w, 0)).norm() > 0.5);
        }
        let single = design_pump(m, 22..=22, 50.0).unwrap();
        assert_eq!(single.center, m.nu(22, 0));
        #[allow(clippy::reversed_empty_ranges)]
        let empty = design_pump(m, 23..=22, 50.0);
        assert!(empty.is_err());
    }

    #[test]
    fn tailored_pump_is_five_times_broader() {
        let d = PulseDesign::default();
        let m = model();
        let a = design_pump(m, 18..=25, d.pump_fwhm(false)).unwrap();
        let b = design_pump(m, 18..=25, d.pump_fwhm(true)).unwrap();
        assert!((b.bandwidth_fwhm() / a.bandwidth_fwhm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn stokes_constant_mask_is_plain() {
        let m = model();
        let s = design_stokes(m, 4, 20..=23, &[false; 4], 50.0).unwrap();
        let plain = PulseSpec::gaussian(s.center, 50.0).unwrap();
        for w in 18..=25 {
            let nu = m.nu(w, 4);
            assert_eq!(s.spectral_amplitude(nu), plain.spectral_amplitude(nu));
        }
        assert!(s.center < design_pump(m, 20..=23, 50.0).unwrap().center);
    }

    #[test]
    fn stokes_alternating_mask() {
        let m = model();
        let bits = [false, true, false, true];
        let s = design_stokes(m, 4, 20..=23, &bits, 50.0).unwrap();
        let plain = PulseSpec::gaussian(s.center, 50.0).unwrap();
        for (k, w) in (20..=23).enumerate() {
            let nu = m.nu(w, 4);
            let sign = if bits[k] { -1.0 } else { 1.0 };
            assert_eq!(
                s.spectral_amplitude(nu),
                plain.spectral_amplitude(nu) * sign
            );
        }
        let flipped = design_stokes(m, 4, 20..=23, &[true, false, true, false], 50.0).unwrap();
        for w in 20..=23 {
            let nu = m.nu(w, 4);
            assert_eq!(flipped.spectral_amplitude(nu), -s.spectral_amplitude(nu));
        }
        assert!(design_stokes(m, 4, 20..=23, &bits[..3], 50.0).is_err());
    }

    #[test]
    fn stokes_bins_partition_transitions() {
        let m = model();
        for range in [20..=23, 19..=24, 18..=25] {
            let edges = stokes_bin_edges(m, 4, range.clone()).unwrap();
            let mask = SpectralMask::from_bits(edges.clone(), &vec![false; range.clone().count()])
                .unwrap();
            for (k, w) in range.clone().enumerate() {
                let nu = m.nu(w, 4);
                assert!(edges[k] < nu && nu < edges[k + 1]);
                assert_eq!(mask.bin_of(nu), Some(k));
            }
        }
        let single = stokes_bin_edges(m, 4, 22..=22).unwrap();
        assert!(single[0] < m.nu(22, 4) && m.nu(22, 4) < single[1]);
    }

    #[test]
    fn probe_selects_one_level() {
        let m = model();
        let d = PulseDesign::default();
        let p = design_probe(m, 22, 4, d.probe_fwhm()).unwrap();
        assert_eq!(p.center, m.transition_wavenumber(22, 4).unwrap());
        assert!(p.bandwidth_fwhm() < 85.0);
        for w in [21, 23] {
            assert!(p.spectral_amplitude(m.nu(w, 4)).norm() < 1e-3);
        }
        let literal = design_probe(m, 22, 4, 1000.0).unwrap();
        assert!((literal.bandwidth_fwhm() - 14.7).abs() < 0.1);
        for w in [21, 23] {
            assert!(literal.spectral_amplitude(m.nu(w, 4)).norm() < 1e-3);
        }
        assert!(design_probe(m, 22, 1000, 1000.0).is_err());
    }

    #[test]
    fn inverse_transform_recovers_duration() {
        // E(t) = ∫ A(ν) e^{-iωt} dω/2π by brute-force quadrature
        for &fwhm in &[10.0, 29.4, 50.0] {
            let p = PulseSpec::gaussian(15000.0, fwhm).unwrap();
            let bw = p.bandwidth_fwhm();
            let n = 4001;
            let lo = p.center - 6.0 * bw;
            let h = 12.0 * bw / (n - 1) as f64;
            let field = |t: f64| -> f64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let nu = lo + i as f64 * h;
                    let wgt = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                    acc += p.spectral_amplitude(nu)
                        * Complex64::from_polar(wgt, -angular(nu - p.center) * t);
                }
                (acc * angular(h) / (2.0 * PI)).norm_sqr()
            };
            let peak = field(0.0);
            // bisect the half-intensity point
            let (mut a, mut b) = (0.0, 2.0 * fwhm);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if field(mid) > 0.5 * peak {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let measured = 2.0 * a;
            assert!((measured / fwhm - 1.0).abs() < 0.01, "{measured} vs {fwhm}");
            // and the analytic field envelope agrees with the transform
            let e0 = p.field_envelope(0.0).unwrap();
            assert!((e0 * e0 / peak - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn spectrum_csv() {
        let p = PulseSpec::gaussian(100.0, 50.0).unwrap();
        let mut buf = Vec::new();
        p.write_spectrum_csv(&mut buf, 0.0, 200.0, 11).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert!(text.starts_with("nu_cm1,re_amp,im_amp\n"));
    }

    proptest! {
        #[test]
        fn delay_only_changes_phase(delay in -2000.0..2000.0f64, nu in 14000.0..20000.0f64) {
            let p = PulseSpec::gaussian(17000.0, 30.0).unwrap();
            let d = p.clone().with_delay(delay);
            let a = p.spectral_amplitude(nu).norm();
            let b = d.spectral_amplitude(nu).norm();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }

        #[test]
        fn phase_mask_is_an_involution(bits in proptest::collection::vec(any::<bool>(), 1..10), nu in 0.0..12.0f64) {
            let edges: Vec<f64> = (0..=bits.len()).map(|k| k as f64).collect();
            let m = SpectralMask::from_bits(edges, &bits).unwrap();
            let twice = m.compose(&m).unwrap();
            prop_assert_eq!(twice.factor_at(nu), Complex64::new(1.0, 0.0));
        }
    }
}
