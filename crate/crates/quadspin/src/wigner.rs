//! Spherical Wigner quasi-probability distribution via the multipole
//! expansion W(θ,φ) = √(d/4π) Σ_{l,m} ρ_{l,m} Y_{l,m}(θ,φ), with
//! ρ_{l,m} = Tr(ρ T_{l,m}†) over the trace-orthonormal tensor basis.
//!
//! The prefactor is anchored by the maximally mixed state (W = 1/4π
//! everywhere), which normalizes ∫ W dΩ = 1 for every unit-trace state.

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, C64};
use crate::spin::{DensityMatrix, SpinError, SpinNumber, TensorBasis};

#[derive(Debug, Error)]
pub enum WignerError {
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error("basis spin {basis} does not match state spin {state}")]
    BasisMismatch { basis: String, state: String },
    #[error("grid must have at least 2 nodes per axis (got {n_theta}x{n_phi})")]
    DegenerateGrid { n_theta: usize, n_phi: usize },
    #[error("imaginary residue {value:.3e} exceeds 1e-10; state is not Hermitian")]
    ImaginaryResidue { value: f64 },
}

/// Multipole moments ρ_{l,m} = Tr(ρ T_{l,m}†) of a state.
#[derive(Debug, Clone)]
pub struct MultipoleMoments {
    spin: SpinNumber,
    /// Indexed like the tensor basis: offset l² + (m + l).
    moments: Vec<C64>,
}

impl MultipoleMoments {
    pub fn spin(&self) -> SpinNumber {
        self.spin
    }

    pub fn get(&self, l: u32, m: i64) -> C64 {
        let offset = (l as usize) * (l as usize);
        self.moments[offset + (m + l as i64) as usize]
    }

    /// Σ|ρ_{l,m}|², equal to Tr(ρ²) by Parseval.
    pub fn norm_squared(&self) -> f64 {
        self.moments.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Expand a state over the tensor basis.
pub fn multipole_moments(
    rho: &DensityMatrix,
    basis: &TensorBasis,
) -> Result<MultipoleMoments, WignerError> {
    if basis.spin() != rho.spin() {
        return Err(WignerError::BasisMismatch {
            basis: basis.spin().to_string(),
            state: rho.spin().to_string(),
        });
    }
    let moments = basis
        .iter()
        .map(|(_, _, t)| linalg::trace(&rho.matrix().dot(&linalg::dagger(t.matrix()))))
        .collect();
    Ok(MultipoleMoments {
        spin: rho.spin(),
        moments,
    })
}

/// Evaluate W at one point. The imaginary part cancels analytically for
/// Hermitian states and is discarded here; [`wigner_grid`] checks the
/// residue.
pub fn wigner_at(moments: &MultipoleMoments, theta: f64, phi: f64) -> f64 {
    wigner_at_complex(moments, theta, phi).re
}

fn wigner_at_complex(moments: &MultipoleMoments, theta: f64, phi: f64) -> C64 {
    let two_i = moments.spin.two_i();
    let d = moments.spin.dimension() as f64;
    let prefactor = (d / (4.0 * std::f64::consts::PI)).sqrt();
    let legendre = normalized_legendre_table(two_i, theta.cos(), theta.sin());
    let mut sum = C64::new(0.0, 0.0);
    for l in 0..=two_i {
        for m in -(l as i64)..=(l as i64) {
            let y = harmonic_from_table(&legendre, l, m, phi);
            sum += moments.get(l, m) * y;
        }
    }
    sum * prefactor
}

/// Wigner values on a uniform (θ, φ) grid, θ ∈ [0, π], φ ∈ [0, 2π).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Row-major values[j][k] = W(θ_j, φ_k).
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    /// Quadrature estimate of ∫ W dΩ with the sin θ weight.
    pub fn quadrature_integral(&self) -> f64 {
        let d_theta = std::f64::consts::PI / (self.n_theta() - 1) as f64;
        let d_phi = std::f64::consts::TAU / self.n_phi() as f64;
        let mut total = 0.0;
        for (j, &theta) in self.theta.iter().enumerate() {
            // Trapezoid weights in θ; φ is periodic so the rectangle rule
            // is already spectrally accurate there.
            let w_theta = if j == 0 || j == self.n_theta() - 1 {
                0.5
            } else {
                1.0
            };
            let row_sum: f64 = self.values[j].iter().sum();
            total += w_theta * row_sum * theta.sin();
        }
        total * d_theta * d_phi
    }

    /// Grid indices of the global maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_val = f64::NEG_INFINITY;
        for (j, row) in self.values.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v > best_val {
                    best_val = v;
                    best = (j, k);
                }
            }
        }
        best
    }

    /// Strict local maxima over the 8-neighborhood, with wraparound in φ,
    /// sorted by descending value.
    pub fn local_maxima(&self) -> Vec<(usize, usize, f64)> {
        let nt = self.n_theta();
        let np = self.n_phi();
        let mut maxima = Vec::new();
        for j in 0..nt {
            for k in 0..np {
                let v = self.values[j][k];
                let mut is_max = true;
                'scan: for dj in -1i64..=1 {
                    for dk in -1i64..=1 {
                        if dj == 0 && dk == 0 {
                            continue;
                        }
                        let jj = j as i64 + dj;
                        if jj < 0 || jj >= nt as i64 {
                            continue;
                        }
                        let kk = (k as i64 + dk).rem_euclid(np as i64) as usize;
                        if self.values[jj as usize][kk] >= v {
                            is_max = false;
                            break 'scan;
                        }
                    }
                }
                if is_max {
                    maxima.push((j, k, v));
                }
            }
        }
        maxima.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());
        maxima
    }
}

/// Evaluate the Wigner distribution of a state on an n_theta × n_phi grid.
pub fn wigner_grid(
    rho: &DensityMatrix,
    n_theta: usize,
    n_phi: usize,
) -> Result<WignerGrid, WignerError> {
    if n_theta < 2 || n_phi < 2 {
        return Err(WignerError::DegenerateGrid { n_theta, n_phi });
    }
    let basis = TensorBasis::new(rho.spin());
    let moments = multipole_moments(rho, &basis)?;

    let theta: Vec<f64> = (0..n_theta)
        .map(|j| std::f64::consts::PI * j as f64 / (n_theta - 1) as f64)
        .collect();
    let phi: Vec<f64> = (0..n_phi)
        .map(|k| std::f64::consts::TAU * k as f64 / n_phi as f64)
        .collect();

    let rows: Vec<Result<Vec<f64>, WignerError>> = theta
        .par_iter()
        .map(|&th| {
            let mut row = Vec::with_capacity(n_phi);
            for &ph in &phi {
                let w = wigner_at_complex(&moments, th, ph);
                if w.im.abs() > 1e-10 {
                    return Err(WignerError::ImaginaryResidue { value: w.im.abs() });
                }
                row.push(w.re);
            }
            Ok(row)
        })
        .collect();

    let mut values = Vec::with_capacity(n_theta);
    for row in rows {
        values.push(row?);
    }
    Ok(WignerGrid { theta, phi, values })
}

/// Orthonormal spherical harmonic Y_{l,m}(θ, φ) with the Condon–Shortley
/// phase, accurate to ~1e-14 for the small l needed here (l ≤ 2I).
pub fn spherical_harmonic(l: u32, m: i64, theta: f64, phi: f64) -> C64 {
    let table = normalized_legendre_table(l, theta.cos(), theta.sin());
    harmonic_from_table(&table, l, m, phi)
}

fn harmonic_from_table(table: &[Vec<f64>], l: u32, m: i64, phi: f64) -> C64 {
    let m_abs = m.unsigned_abs() as u32;
    let p = table[l as usize][m_abs as usize];
    let phase = C64::new(0.0, m_abs as f64 * phi).exp();
    if m >= 0 {
        phase * p
    } else {
        // Y_{l,−m} = (−1)^m conj(Y_{l,m}).
        let sign = if m_abs.is_multiple_of(2) { 1.0 } else { -1.0 };
        phase.conj() * (p * sign)
    }
}

/// Fully normalized associated Legendre values P̄_l^m(cos θ) for m ≥ 0,
/// l ≤ l_max, via the standard stable three-term recurrence seeded along
/// the sectoral diagonal. The normalization already includes the
/// √((2l+1)(l−m)!/(4π(l+m)!)) factor of the orthonormal harmonics and the
/// Condon–Shortley sign.
#[allow(clippy::needless_range_loop)] // recurrences couple rows at fixed m
fn normalized_legendre_table(l_max: u32, cos_theta: f64, sin_theta: f64) -> Vec<Vec<f64>> {
    let lm = l_max as usize;
    let mut p = vec![vec![0.0f64; lm + 1]; lm + 1];
    p[0][0] = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    let mut sectoral = p[0][0];
    for m in 1..=lm {
        // Sectoral: P̄_m^m = −√((2m+1)/(2m)) sinθ P̄_{m−1}^{m−1}.
        let ratio = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        sectoral *= -ratio * sin_theta;
        p[m][m] = sectoral;
    }
    for m in 0..lm {
        // First off-diagonal: P̄_{m+1}^m = √(2m+3) cosθ P̄_m^m.
        p[m + 1][m] = ((2 * m + 3) as f64).sqrt() * cos_theta * p[m][m];
    }
    for m in 0..=lm {
        for l in (m + 2)..=lm {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            p[l][m] = a * (cos_theta * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    p
}
