//! Sinc-DVR bound-state solver on a uniform 1-D grid.
//!
//! The kinetic operator uses the uniform-grid sinc-DVR closed form
//! (Colbert & Miller): `T_ii = K π²/3`, `T_ij = K 2(-1)^(i-j)/(i-j)²` with
//! `K = ħ²/(2μΔr²)`. The potential is diagonal. Analytic Morse levels are
//! provided as the oracle the solver is checked against.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::molecule::MorseParams;
use crate::units::HBAR2_OVER_2AMU_A2;

/// Uniform radial grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    r_min: f64,
    r_max: f64,
    n_points: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_min >= r_max {
            return Err(Error::Invalid(format!(
                "grid bounds must satisfy r_min < r_max (got {r_min}, {r_max})"
            )));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::Invalid(format!(
                "grid needs at least {} points (got {n_points})",
                Self::MIN_POINTS
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            n_points,
        })
    }

    /// r ∈ [2.0, 6.5] Å with 512 points; spans both iodine wells.
    pub fn iodine_default() -> Self {
        Self::new(2.0, 6.5, 512).expect("default grid is valid")
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points - 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.r_max
        } else {
            self.r_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.r(i))
    }
}

/// Sinc-DVR kinetic energy matrix in cm⁻¹.
pub fn kinetic_matrix(grid: &Grid, reduced_mass: f64) -> Result<DMatrix<f64>> {
    if !(reduced_mass > 0.0 && reduced_mass.is_finite()) {
        return Err(Error::Invalid(format!(
            "reduced mass must be positive (got {reduced_mass})"
        )));
    }
    let dr = grid.spacing();
    let k = HBAR2_OVER_2AMU_A2 / (reduced_mass * dr * dr);
    let diag = k * std::f64::consts::PI.powi(2) / 3.0;
    let n = grid.n_points();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let d = i.abs_diff(j);
        if d == 0 {
            diag
        } else {
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            k * sign * 2.0 / (d * d) as f64
        }
    }))
}

/// Kinetic matrix plus the diagonal potential sampled on the grid.
pub fn build_hamiltonian<F>(grid: &Grid, potential: F, reduced_mass: f64) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> f64,
{
    let mut h = kinetic_matrix(grid, reduced_mass)?;
    for (i, r) in grid.points().enumerate() {
        let v = potential(r);
        if !v.is_finite() {
            return Err(Error::NonFinitePotential {
                index: i,
                r,
                value: v,
            });
        }
        h[(i, i)] += v;
    }
    Ok(h)
}

/// Lowest eigenpairs of a real symmetric matrix, ascending.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Diagonalizes `hamiltonian` and keeps the lowest `n_states` pairs.
///
/// Each eigenvector is flipped so that its first component above 10⁻³ of
/// its largest magnitude is positive.
pub fn solve_bound_states(hamiltonian: &DMatrix<f64>, n_states: usize) -> Result<Eigenpairs> {
    let n = hamiltonian.nrows();
    if hamiltonian.ncols() != n {
        return Err(Error::Invalid("hamiltonian must be square".into()));
    }
    if n_states == 0 || n_states > n {
        return Err(Error::Invalid(format!(
            "requested {n_states} states from a {n}x{n} matrix"
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if hamiltonian[(i, j)] != hamiltonian[(j, i)] {
                return Err(Error::Invalid(format!(
                    "hamiltonian not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let eig = SymmetricEigen::try_new(hamiltonian.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut energies = Vec::with_capacity(n_states);
    let mut vectors = Vec::with_capacity(n_states);
    for &k in order.iter().take(n_states) {
        let e = eig.eigenvalues[k];
        if !e.is_finite() {
            return Err(Error::Numerical(format!("non-finite eigenvalue {e}")));
        }
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        fix_sign(&mut v);
        energies.push(e);
        vectors.push(v);
    }
    Ok(Eigenpairs { energies, vectors })
}

fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Bound states of one potential on a grid.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub grid: Grid,
    /// Ascending, cm⁻¹.
    pub energies: Vec<f64>,
    /// Unit-norm coefficient vectors over the grid points.
    pub wavefunctions: Vec<Vec<f64>>,
}

impl EigenSolution {
    pub fn new(grid: Grid, pairs: Eigenpairs) -> Self {
        Self {
            grid,
            energies: pairs.energies,
            wavefunctions: pairs.vectors,
        }
    }

    pub fn n_bound(&self) -> usize {
        self.energies.len()
    }

    pub fn truncate(&mut self, n: usize) {
        self.energies.truncate(n);
        self.wavefunctions.truncate(n);
    }

    pub fn energy(&self, level: usize) -> Result<f64> {
        self.energies
            .get(level)
            .copied()
            .ok_or(Error::LevelOutOfRange {
                what: "eigen solution",
                index: level,
                available: self.n_bound(),
            })
    }

    /// Rows `index, energy_cm1, ψ(r_0), ψ(r_1), ...`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "index,energy_cm1")?;
        for i in 0..self.grid.n_points() {
            write!(out, ",psi_{i}")?;
        }
        writeln!(out)?;
        for (k, (e, psi)) in self.energies.iter().zip(&self.wavefunctions).enumerate() {
            write!(out, "{k},{e:.10}")?;
            for x in psi {
                write!(out, ",{x:.12e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Harmonic wavenumber ω_e (cm⁻¹) of a Morse well.
pub fn morse_omega_e(params: &MorseParams, reduced_mass: f64) -> f64 {
    2.0 * params.beta * (params.d_e * HBAR2_OVER_2AMU_A2 / reduced_mass).sqrt()
}

/// Anharmonicity ω_e x_e = ω_e²/(4 D_e).
pub fn morse_omega_e_xe(params: &MorseParams, reduced_mass: f64) -> f64 {
    let we = morse_omega_e(params, reduced_mass);
    we * we / (4.0 * params.d_e)
}

/// Number of bound Morse levels: ⌊2D_e/ω_e − ½⌋ + 1.
pub fn morse_bound_count(params: &MorseParams, reduced_mass: f64) -> usize {
    let x = 2.0 * params.d_e / morse_omega_e(params, reduced_mass) - 0.5;
    let top = x.floor();
    // n+½ = 2D_e/ω_e exactly sits at the dissociation limit
    let top = if top == x { top - 1.0 } else { top };
    (top.max(-1.0) + 1.0) as usize
}

/// Analytic Morse levels E_n = ω_e(n+½) − ω_e x_e (n+½)², measured from the
/// well bottom, for n = 0..n_levels.
pub fn morse_analytic_levels(
    params: &MorseParams,
    reduced_mass: f64,
    n_levels: usize,
) -> Result<Vec<f64>> {
    let bound = morse_bound_count(params, reduced_mass);
    if n_levels > bound {
        return Err(Error::LevelOutOfRange {
            what: "analytic Morse spectrum",
            index: n_levels - 1,
            available: bound,
        });
    }
    let we = morse_omega_e(params, reduced_mass);
    let wexe = morse_omega_e_xe(params, reduced_mass);
    Ok((0..n_levels)
        .map(|n| {
            let h = n as f64 + 0.5;
            we * h - wexe * h * h
        })
        .collect())
}
