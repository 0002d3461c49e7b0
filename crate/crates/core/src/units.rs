//! Unit system and physical constants.
//!
//! Lengths are in Å, masses in amu, energies in cm⁻¹ and times in fs. Free
//! evolution of a level with energy `E` (cm⁻¹) over `t` (fs) is
//! `exp(-i 2π c E t)` with `c` in cm/fs; absorption uses the field spectrum
//! and stimulated emission its complex conjugate.

use std::f64::consts::PI;

/// Speed of light in cm/fs.
pub const C_CM_PER_FS: f64 = 2.997_924_58e-5;

const PLANCK_J_S: f64 = 6.626_070_15e-34;
const HBAR_J_S: f64 = 1.054_571_817e-34;
const AMU_KG: f64 = 1.660_539_066_60e-27;
const C_M_PER_S: f64 = 299_792_458.0;

/// ħ²/(2·1 amu·1 Å²) expressed in cm⁻¹.
pub const HBAR2_OVER_2AMU_A2: f64 =
    HBAR_J_S * HBAR_J_S / (2.0 * AMU_KG * 1e-20) / (PLANCK_J_S * C_M_PER_S * 100.0);

/// Atomic mass of ¹²⁷I in amu.
pub const IODINE_127_AMU: f64 = 126.904_473;

/// Reduced mass of the ¹²⁷I₂ homonuclear diatomic.
pub const I2_REDUCED_MASS_AMU: f64 = IODINE_127_AMU / 2.0;

/// Angular frequency (rad/fs) of a wavenumber (cm⁻¹).
#[inline]
pub fn angular(nu_cm1: f64) -> f64 {
    2.0 * PI * C_CM_PER_FS * nu_cm1
}

/// Period (fs) of a beat at the given wavenumber (cm⁻¹).
#[inline]
pub fn period_fs(nu_cm1: f64) -> f64 {
    1.0 / (C_CM_PER_FS * nu_cm1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinetic_prefactor_matches_codata() {
        assert!((HBAR2_OVER_2AMU_A2 - 16.857_629_17).abs() < 1e-7);
    }

    #[test]
    fn period_of_85_wavenumbers() {
        assert!((period_fs(85.0) - 392.4).abs() < 0.1);
    }
}
