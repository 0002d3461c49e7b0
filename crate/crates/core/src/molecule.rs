//! Iodine X/B vibronic model.

use std::io::Write;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::{build_hamiltonian, solve_bound_states, EigenSolution, Grid};
use crate::units::{period_fs, I2_REDUCED_MASS_AMU};

/// Morse well `D_e (1 - exp(-β (r - r_e)))²` raised by `T_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    /// Well depth, cm⁻¹.
    pub d_e: f64,
    /// Equilibrium bond length, Å.
    pub r_e: f64,
    /// Range parameter, Å⁻¹.
    pub beta: f64,
    /// Electronic offset of the well minimum, cm⁻¹.
    pub t_e: f64,
}

impl MorseParams {
    pub fn new(d_e: f64, r_e: f64, beta: f64, t_e: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(d_e) && ok(r_e) && ok(beta)) || !(t_e.is_finite() && t_e >= 0.0) {
            return Err(Error::Invalid(format!(
                "Morse parameters must be positive with T_e >= 0 \
                 (D_e={d_e}, r_e={r_e}, beta={beta}, T_e={t_e})"
            )));
        }
        Ok(Self {
            d_e,
            r_e,
            beta,
            t_e,
        })
    }

    /// Ground state X of I₂.
    pub fn iodine_x() -> Self {
        Self::new(12550.0, 2.666, 1.858, 0.0).unwrap()
    }

    /// Excited state B of I₂; its minimum lies 15647 cm⁻¹ above X.
    pub fn iodine_b() -> Self {
        Self::new(4500.0, 3.016, 1.850, 15647.0).unwrap()
    }

    /// Potential measured from the well bottom.
    pub fn well(&self, r: f64) -> f64 {
        let y = 1.0 - (-self.beta * (r - self.r_e)).exp();
        self.d_e * y * y
    }

    pub fn potential(&self, r: f64) -> f64 {
        self.t_e + self.well(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    X,
    B,
}

impl std::fmt::Display for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Surface::X => write!(f, "X"),
            Surface::B => write!(f, "B"),
        }
    }
}

/// Minimum number of levels that must be retained (v = 0..=10, w = 0..=30),
/// capped by the number of bound levels the well supports.
const MIN_X_LEVELS: usize = 11;
const MIN_B_LEVELS: usize = 31;

/// Probability allowed in the outer 5% of the grid on either side before a
/// state counts as touching the box.
const EDGE_WEIGHT_TOL: f64 = 1e-10;

/// The level whose upward spacing sets τ_B. Every window used here is
/// centred on w = 21.5, where the local B spacing is E(22) − E(21).
pub const TAU_B_LEVEL: usize = 21;

/// Paired X/B eigenstructure and Franck-Condon overlaps.
#[derive(Debug, Clone)]
pub struct VibronicModel {
    pub x: EigenSolution,
    pub b: EigenSolution,
    pub x_params: MorseParams,
    pub b_params: MorseParams,
    /// B minimum above X minimum, cm⁻¹.
    pub t_e: f64,
    /// `fc[(w, v)] = ⟨B,w|X,v⟩`.
    pub fc: DMatrix<f64>,
    pub reduced_mass: f64,
}

/// Eigenstates of one well, truncated to the bound and grid-contained ones.
pub fn solve_surface(
    surface: Surface,
    params: &MorseParams,
    reduced_mass: f64,
    grid: &Grid,
    min_levels: usize,
) -> Result<EigenSolution> {
    let h = build_hamiltonian(grid, |r| params.well(r), reduced_mass)?;
    let pairs = solve_bound_states(&h, grid.n_points())?;
    let mut sol = EigenSolution::new(*grid, pairs);

    let n = grid.n_points();
    let edge = (n / 20).max(1);
    let mut retained = 0;
    for k in 0..sol.n_bound().saturating_sub(1) {
        let e = sol.energies[k];
        let spacing = sol.energies[k + 1] - e;
        if e >= params.d_e - spacing {
            break;
        }
        let psi = &sol.wavefunctions[k];
        let edge_weight: f64 = psi[..edge]
            .iter()
            .chain(&psi[n - edge..])
            .map(|x| x * x)
            .sum();
        if edge_weight > EDGE_WEIGHT_TOL {
            break;
        }
        retained += 1;
    }

    let analytic_bound = crate::spectral::morse_bound_count(params, reduced_mass);
    let needed = min_levels.min(analytic_bound);
    if retained < needed {
        let label = match surface {
            Surface::X => 'v',
            Surface::B => 'w',
        };
        return Err(Error::GridTooSmall {
            state: format!("{surface} {label}={retained}"),
            detail: format!(
                "grid [{}, {}] Å keeps {retained} contained levels, {needed} required",
                grid.r_min(),
                grid.r_max()
            ),
        });
    }
    sol.truncate(retained);
    Ok(sol)
}

/// Solves both wells on the shared grid and forms the FC matrix.
pub fn build_model(
    x_params: MorseParams,
    b_params: MorseParams,
    reduced_mass: f64,
    grid: Grid,
) -> Result<VibronicModel> {
    let x = solve_surface(Surface::X, &x_params, reduced_mass, &grid, MIN_X_LEVELS)?;
    let b = solve_surface(Surface::B, &b_params, reduced_mass, &grid, MIN_B_LEVELS)?;
    let fc = DMatrix::from_fn(b.n_bound(), x.n_bound(), |w, v| {
        b.wavefunctions[w]
            .iter()
            .zip(&x.wavefunctions[v])
            .map(|(p, q)| p * q)
            .sum()
    });
    Ok(VibronicModel {
        t_e: b_params.t_e - x_params.t_e,
        x,
        b,
        x_params,
        b_params,
        fc,
        reduced_mass,
    })
}

/// The iodine model on the default grid.
pub fn iodine_model() -> Result<VibronicModel> {
    build_model(
        MorseParams::iodine_x(),
        MorseParams::iodine_b(),
        I2_REDUCED_MASS_AMU,
        Grid::iodine_default(),
    )
}

impl VibronicModel {
    pub fn n_x(&self) -> usize {
        self.x.n_bound()
    }

    pub fn n_b(&self) -> usize {
        self.b.n_bound()
    }

    fn check_w(&self, w: usize) -> Result<()> {
        if w < self.n_b() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                what: "B surface",
                index: w,
                available: self.n_b(),
            })
        }
    }

    fn check_v(&self, v: usize) -> Result<()> {
        if v < self.n_x() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                what: "X surface",
                index: v,
                available: self.n_x(),
            })
        }
    }

    pub fn check_window(&self, w_range: &RangeInclusive<usize>) -> Result<()> {
        if w_range.is_empty() {
            return Err(Error::Invalid("empty w window".into()));
        }
        self.check_w(*w_range.end())
    }

    pub fn fc(&self, w: usize, v: usize) -> f64 {
        self.fc[(w, v)]
    }

    /// ν̃(w, v) = T_e + E_B(w) − E_X(v), cm⁻¹.
    pub fn transition_wavenumber(&self, w: usize, v: usize) -> Result<f64> {
        self.check_w(w)?;
        self.check_v(v)?;
        Ok(self.nu(w, v))
    }

    /// Unchecked form used in inner loops.
    pub(crate) fn nu(&self, w: usize, v: usize) -> f64 {
        self.t_e + self.b.energies[w] - self.x.energies[v]
    }

    /// Period (fs) of the beat between `level` and `level + 1`.
    pub fn vibrational_period(&self, surface: Surface, level: usize) -> Result<f64> {
        let sol = match surface {
            Surface::X => &self.x,
            Surface::B => &self.b,
        };
        if level + 1 >= sol.n_bound() {
            return Err(Error::LevelOutOfRange {
                what: "vibrational period (needs level + 1)",
                index: level,
                available: sol.n_bound(),
            });
        }
        Ok(period_fs(sol.energies[level + 1] - sol.energies[level]))
    }

    /// τ_B, the B-state period at the window centre.
    pub fn tau_b(&self) -> f64 {
        self.vibrational_period(Surface::B, TAU_B_LEVEL)
            .expect("model retains the B window levels")
    }

    /// `(w, |fc[w][0] · fc[w][v_target]|)` over the window.
    pub fn fc_window_score(
        &self,
        v_target: usize,
        w_range: RangeInclusive<usize>,
    ) -> Result<Vec<(usize, f64)>> {
        self.check_v(v_target)?;
        self.check_window(&w_range)?;
        Ok(w_range
            .map(|w| (w, (self.fc(w, 0) * self.fc(w, v_target)).abs()))
            .collect())
    }

    /// Copy with every `fc[w][v]`, `w` in the window and `v` in `levels`,
    /// replaced by the geometric mean of the window magnitudes for that `v`
    /// (signs kept).
    pub fn with_equalized_fc(
        &self,
        w_range: RangeInclusive<usize>,
        levels: &[usize],
    ) -> Result<VibronicModel> {
        self.check_window(&w_range)?;
        let mut out = self.clone();
        for &v in levels {
            self.check_v(v)?;
            let n = w_range.clone().count() as f64;
            let mut log_sum = 0.0;
            for w in w_range.clone() {
                let f = self.fc(w, v).abs();
                if f == 0.0 {
                    return Err(Error::Numerical(format!(
                        "cannot equalize: fc[{w}][{v}] vanishes"
                    )));
                }
                log_sum += f.ln();
            }
            let common = (log_sum / n).exp();
            for w in w_range.clone() {
                out.fc[(w, v)] = common.copysign(self.fc(w, v));
            }
        }
        Ok(out)
    }

    /// Rows `w, v, fc, nu_cm1` for every retained pair.
    pub fn write_fc_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "w,v,fc,nu_cm1")?;
        for w in 0..self.n_b() {
            for v in 0..self.n_x() {
                writeln!(out, "{w},{v},{:.12e},{:.6}", self.fc(w, v), self.nu(w, v))?;
            }
        }
        Ok(())
    }
}
