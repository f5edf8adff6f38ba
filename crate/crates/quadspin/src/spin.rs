//! Operator algebra for a single spin I: angular-momentum operators, the
//! orthonormal irreducible tensor basis, quadrupolar tensors, spin coherent
//! states, and expectation/variance evaluation.
//!
//! Matrices are written in the Zeeman basis |I, I⟩, |I, I−1⟩, …, |I, −I⟩
//! (descending magnetic quantum number), with ħ = 1 throughout.

use ndarray::Array2;
use thiserror::Error;

use crate::linalg::{self, C64};

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("two_i must be at least 1 (got {0})")]
    InvalidSpin(u32),
    #[error("operator dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spin 1/2 has no quadrupole coupling")]
    NoQuadrupole,
    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },
    #[error("density matrix fails {check}: residual {value:.3e} exceeds tolerance {tol:.3e}")]
    InvalidDensity {
        check: &'static str,
        value: f64,
        tol: f64,
    },
    #[error("variance {value:.3e} is negative beyond roundoff tolerance")]
    NegativeVariance { value: f64 },
}

/// Half-integer spin quantum number stored losslessly as 2I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinNumber {
    two_i: u32,
}

impl SpinNumber {
    pub fn new(two_i: u32) -> Result<Self, SpinError> {
        if two_i < 1 {
            return Err(SpinError::InvalidSpin(two_i));
        }
        Ok(Self { two_i })
    }

    pub fn two_i(&self) -> u32 {
        self.two_i
    }

    /// Hilbert-space dimension d = 2I + 1.
    pub fn dimension(&self) -> usize {
        self.two_i as usize + 1
    }

    /// The quantum number I as a float.
    pub fn quantum_number(&self) -> f64 {
        self.two_i as f64 / 2.0
    }

    /// Magnetic quantum numbers in basis order (descending from +I to −I).
    pub fn m_values(&self) -> Vec<f64> {
        let i = self.quantum_number();
        (0..self.dimension()).map(|k| i - k as f64).collect()
    }

    /// Casimir eigenvalue I(I+1).
    pub fn casimir(&self) -> f64 {
        let i = self.quantum_number();
        i * (i + 1.0)
    }
}

impl std::fmt::Display for SpinNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.two_i.is_multiple_of(2) {
            write!(f, "{}", self.two_i / 2)
        } else {
            write!(f, "{}/2", self.two_i)
        }
    }
}

/// A d×d complex matrix labeled by the spin it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    spin: SpinNumber,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(spin: SpinNumber, matrix: Array2<C64>) -> Result<Self, SpinError> {
        let d = spin.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(SpinError::DimensionMismatch {
                expected: d,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { spin, matrix })
    }

    pub fn zeros(spin: SpinNumber) -> Self {
        let d = spin.dimension();
        Self {
            spin,
            matrix: Array2::zeros((d, d)),
        }
    }

    pub fn identity(spin: SpinNumber) -> Self {
        Self {
            spin,
            matrix: linalg::identity(spin.dimension()),
        }
    }

    pub fn spin(&self) -> SpinNumber {
        self.spin
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            spin: self.spin,
            matrix: linalg::dagger(&self.matrix),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            spin: self.spin,
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            spin: self.spin,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            spin: self.spin,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            spin: self.spin,
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius_norm(&self.matrix)
    }

    fn check_same_spin(&self, other: &Self) -> Result<(), SpinError> {
        if self.spin != other.spin {
            return Err(SpinError::DimensionMismatch {
                expected: self.spin.dimension(),
                got: other.spin.dimension(),
            });
        }
        Ok(())
    }
}

/// Commutator [a, b] of two operators on the same spin.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator, SpinError> {
    a.check_same_spin(b)?;
    Ok(Operator {
        spin: a.spin,
        matrix: linalg::commutator(&a.matrix, &b.matrix),
    })
}

/// The Cartesian and ladder angular-momentum operators for one spin.
///
/// Iz is diagonal with entries m = I…−I; ⟨m+1|I₊|m⟩ = √(I(I+1) − m(m+1));
/// Ix = (I₊+I₋)/2, Iy = (I₊−I₋)/(2i); I² = I(I+1)·1.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub ix: Operator,
    pub iy: Operator,
    pub iz: Operator,
    pub iplus: Operator,
    pub iminus: Operator,
    pub isq: Operator,
}

impl SpinOperators {
    pub fn new(spin: SpinNumber) -> Self {
        let d = spin.dimension();
        let ms = spin.m_values();
        let casimir = spin.casimir();

        let mut iz = Array2::<C64>::zeros((d, d));
        for (k, &m) in ms.iter().enumerate() {
            iz[[k, k]] = C64::new(m, 0.0);
        }

        // Basis order is descending in m, so |m+1⟩ sits one row above |m⟩.
        let mut iplus = Array2::<C64>::zeros((d, d));
        for k in 1..d {
            let m = ms[k];
            iplus[[k - 1, k]] = C64::new((casimir - m * (m + 1.0)).sqrt(), 0.0);
        }
        let iminus = linalg::dagger(&iplus);

        let ix = (&iplus + &iminus) * C64::new(0.5, 0.0);
        let iy = (&iplus - &iminus) * C64::new(0.0, -0.5);
        let isq = linalg::identity(d) * C64::new(casimir, 0.0);

        let wrap = |matrix| Operator { spin, matrix };
        Self {
            ix: wrap(ix),
            iy: wrap(iy),
            iz: wrap(iz),
            iplus: wrap(iplus),
            iminus: wrap(iminus),
            isq: wrap(isq),
        }
    }
}

/// Trace-orthonormal irreducible tensor operators T_{l,m} for one spin,
/// l = 0…2I, m = −l…l.
///
/// Built by normalizing the highest-weight element T_{l,l} ∝ (−1)^l (I₊)^l
/// and lowering with [I₋, T_{l,m}] = √(l(l+1) − m(m−1)) T_{l,m−1}. The
/// result satisfies Tr(T_{l,m}† T_{l',m'}) = δδ, [Iz, T_{l,m}] = m T_{l,m}
/// and T_{l,m}† = (−1)^m T_{l,−m}, with T_{0,0} = 1/√d.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    spin: SpinNumber,
    elements: Vec<Operator>,
}

impl TensorBasis {
    pub fn new(spin: SpinNumber) -> Self {
        let d = spin.dimension();
        let two_i = spin.two_i();
        let ops = SpinOperators::new(spin);
        let mut elements = Vec::with_capacity(d * d);

        for l in 0..=two_i {
            // Highest weight: (−1)^l (I₊)^l, unit Frobenius norm.
            let mut top = linalg::identity(d);
            for _ in 0..l {
                top = ops.iplus.matrix().dot(&top);
            }
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let norm = linalg::frobenius_norm(&top);
            top *= C64::new(sign / norm, 0.0);

            let mut ladder = Vec::with_capacity(2 * l as usize + 1);
            ladder.push(top);
            let lf = l as f64;
            for m in (-(l as i64) + 1..=l as i64).rev() {
                let mf = m as f64;
                let coeff = (lf * (lf + 1.0) - mf * (mf - 1.0)).sqrt();
                let prev = ladder.last().unwrap();
                let lowered =
                    linalg::commutator(ops.iminus.matrix(), prev) * C64::new(1.0 / coeff, 0.0);
                ladder.push(lowered);
            }
            // `ladder` now runs m = l down to m = −l; store ascending in m.
            for matrix in ladder.into_iter().rev() {
                elements.push(Operator { spin, matrix });
            }
        }
        Self { spin, elements }
    }

    pub fn spin(&self) -> SpinNumber {
        self.spin
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The element T_{l,m}. Panics if (l, m) is out of range.
    pub fn get(&self, l: u32, m: i64) -> &Operator {
        assert!(l <= self.spin.two_i(), "rank l={l} out of range");
        assert!(m.unsigned_abs() as u32 <= l, "order m={m} out of range for l={l}");
        let offset = (l as usize) * (l as usize);
        &self.elements[offset + (m + l as i64) as usize]
    }

    /// Iterate (l, m, T_{l,m}) over the whole basis.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i64, &Operator)> {
        self.elements.iter().enumerate().map(|(idx, op)| {
            let l = (idx as f64).sqrt().floor() as u32;
            let m = idx as i64 - (l as i64) * (l as i64) - l as i64;
            (l, m, op)
        })
    }
}

/// Dimensionless quadrupolar tensor operators Q⁽ᵖ⁾, p = −2…2, with the
/// dimensional prefactor eQ/(2I(2I−1)) stripped (it is carried, squared,
/// inside the relaxation constant C_Q):
///
///   Q⁽±²⁾ = (√6/2)·I±²,  Q⁽±¹⁾ = ∓(√6/2)·(Iz I± + I± Iz),  Q⁽⁰⁾ = 3Iz² − I².
#[derive(Debug, Clone)]
pub struct QuadrupoleTensors {
    spin: SpinNumber,
    q: [Operator; 5],
}

impl QuadrupoleTensors {
    pub fn new(spin: SpinNumber) -> Result<Self, SpinError> {
        if spin.two_i() < 2 {
            return Err(SpinError::NoQuadrupole);
        }
        let ops = SpinOperators::new(spin);
        let half_sqrt6 = 6.0f64.sqrt() / 2.0;

        let q_plus2 = ops.iplus.mul(&ops.iplus).scale_re(half_sqrt6);
        let q_minus2 = ops.iminus.mul(&ops.iminus).scale_re(half_sqrt6);
        let q_plus1 = ops
            .iz
            .mul(&ops.iplus)
            .add(&ops.iplus.mul(&ops.iz))
            .scale_re(-half_sqrt6);
        let q_minus1 = ops
            .iz
            .mul(&ops.iminus)
            .add(&ops.iminus.mul(&ops.iz))
            .scale_re(half_sqrt6);
        let q_zero = ops.iz.mul(&ops.iz).scale_re(3.0).sub(&ops.isq);

        Ok(Self {
            spin,
            q: [q_minus2, q_minus1, q_zero, q_plus1, q_plus2],
        })
    }

    pub fn spin(&self) -> SpinNumber {
        self.spin
    }

    /// The tensor Q⁽ᵖ⁾ for p in −2…2.
    pub fn get(&self, p: i32) -> &Operator {
        assert!((-2..=2).contains(&p), "p={p} out of range");
        &self.q[(p + 2) as usize]
    }
}

/// Polar/azimuthal angles selecting a spin coherent state via the
/// excitation parameter ζ = tan(θ/2)·e^{−iφ}.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CoherentStateParams {
    pub theta: f64,
    pub phi: f64,
}

impl CoherentStateParams {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator representing the
/// spin state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: Operator,
    tol: f64,
}

pub const DEFAULT_DENSITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self, SpinError> {
        Self::with_tol(op, DEFAULT_DENSITY_TOL)
    }

    pub fn with_tol(op: Operator, tol: f64) -> Result<Self, SpinError> {
        let herm = op.hermiticity_residual();
        if herm > tol {
            return Err(SpinError::InvalidDensity {
                check: "hermiticity",
                value: herm,
                tol,
            });
        }
        let trace_residual = (op.trace() - C64::new(1.0, 0.0)).norm();
        if trace_residual > tol {
            return Err(SpinError::InvalidDensity {
                check: "unit trace",
                value: trace_residual,
                tol,
            });
        }
        let min_eig = linalg::smallest_hermitian_eigenvalue(op.matrix());
        if min_eig < -tol {
            return Err(SpinError::InvalidDensity {
                check: "positivity",
                value: min_eig,
                tol,
            });
        }
        Ok(Self { op, tol })
    }

    /// Pure state ρ = |ψ⟩⟨ψ| from normalized amplitudes in basis order.
    pub fn pure_from_amplitudes(spin: SpinNumber, amps: &[C64]) -> Result<Self, SpinError> {
        let d = spin.dimension();
        if amps.len() != d {
            return Err(SpinError::DimensionMismatch {
                expected: d,
                got: amps.len(),
            });
        }
        let mut matrix = Array2::<C64>::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                matrix[[i, j]] = amps[i] * amps[j].conj();
            }
        }
        Self::new(Operator { spin, matrix })
    }

    pub fn spin(&self) -> SpinNumber {
        self.op.spin()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &Array2<C64> {
        self.op.matrix()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.matrix().dot(self.matrix()).diag().iter().map(|z| z.re).sum()
    }

    /// Tr(ρσ); equals state fidelity when either argument is pure.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.matrix()
            .dot(other.matrix())
            .diag()
            .iter()
            .map(|z| z.re)
            .sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.matrix())
    }

    pub fn trace_residual(&self) -> f64 {
        (self.op.trace() - C64::new(1.0, 0.0)).norm()
    }
}

/// Spin coherent state |ζ(θ,φ)⟩⟨ζ(θ,φ)| with amplitudes
/// c_m = ζ^{I+m}/(1+ζ*ζ)^I · √((2I)!/((I+m)!(I−m)!)), ζ = tan(θ/2) e^{−iφ}.
///
/// Evaluated in the equivalent product form
/// c_m = sin^{I+m}(θ/2) cos^{I−m}(θ/2) √C(2I, I+m) e^{−i(I+m)φ}, which is
/// finite for all θ in [0, π] and reproduces the analytic limits |I,−I⟩ at
/// θ = 0 and |I,+I⟩ at θ = π.
pub fn coherent_state(spin: SpinNumber, params: &CoherentStateParams) -> DensityMatrix {
    let d = spin.dimension();
    let two_i = spin.two_i();
    let half = params.theta / 2.0;
    let (sin_h, cos_h) = (half.sin(), half.cos());

    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (k, amp) in amps.iter_mut().enumerate() {
        // Basis index k holds m = I − k, so I + m = 2I − k.
        let i_plus_m = (two_i as usize) - k;
        let i_minus_m = k;
        let magnitude = sin_h.powi(i_plus_m as i32)
            * cos_h.powi(i_minus_m as i32)
            * binomial(two_i as usize, i_plus_m).sqrt();
        let phase = C64::new(0.0, -(i_plus_m as f64) * params.phi).exp();
        *amp = phase * magnitude;
    }
    DensityMatrix::pure_from_amplitudes(spin, &amps)
        .expect("coherent state construction is exact")
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut result = 1.0f64;
    for j in 0..k {
        result = result * (n - j) as f64 / (j + 1) as f64;
    }
    result
}

/// Tr(ρO).
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64, SpinError> {
    rho.operator().check_same_spin(op)?;
    Ok(linalg::trace(&rho.matrix().dot(op.matrix())))
}

/// Tr(ρO) for Hermitian O; the imaginary residue must stay below 1e-10.
pub fn expectation_real(rho: &DensityMatrix, op: &Operator) -> Result<f64, SpinError> {
    let value = expectation(rho, op)?;
    if value.im.abs() > 1e-10 {
        return Err(SpinError::NonHermitian {
            residual: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// Variance ⟨O²⟩ − ⟨O⟩² for Hermitian O, clamped at zero for roundoff in
/// [−1e-10, 0).
pub fn variance(rho: &DensityMatrix, op: &Operator) -> Result<f64, SpinError> {
    let residual = op.hermiticity_residual();
    if residual > 1e-10 {
        return Err(SpinError::NonHermitian { residual });
    }
    let mean = expectation(rho, op)?.re;
    let mean_sq = expectation(rho, &op.mul(op))?.re;
    let var = mean_sq - mean * mean;
    if var < -1e-10 {
        return Err(SpinError::NegativeVariance { value: var });
    }
    Ok(var.max(0.0))
}

/// ⟨O²⟩ for Hermitian O (no mean subtraction).
pub fn second_moment(rho: &DensityMatrix, op: &Operator) -> Result<f64, SpinError> {
    Ok(expectation(rho, &op.mul(op))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn spin(two_i: u32) -> SpinNumber {
        SpinNumber::new(two_i).unwrap()
    }

    #[test]
    fn rejects_zero_spin() {
        assert!(SpinNumber::new(0).is_err());
    }

    #[test]
    fn spin_half_operators() {
        let ops = SpinOperators::new(spin(1));
        assert!((ops.iz.matrix()[[0, 0]].re - 0.5).abs() < 1e-15);
        assert!((ops.iz.matrix()[[1, 1]].re + 0.5).abs() < 1e-15);
        // ⟨1/2| I₊ |−1/2⟩ = 1
        assert!((ops.iplus.matrix()[[0, 1]].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spin_three_half_operators() {
        let ops = SpinOperators::new(spin(3));
        let expected_iz = [1.5, 0.5, -0.5, -1.5];
        for (k, want) in expected_iz.iter().enumerate() {
            assert!((ops.iz.matrix()[[k, k]].re - want).abs() < 1e-15);
        }
        let expected_super = [3.0f64.sqrt(), 2.0, 3.0f64.sqrt()];
        for (k, want) in expected_super.iter().enumerate() {
            assert!((ops.iplus.matrix()[[k, k + 1]].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn su2_commutators_all_supported_spins() {
        for two_i in 1..=9 {
            let s = spin(two_i);
            let ops = SpinOperators::new(s);
            let pairs = [
                (&ops.ix, &ops.iy, &ops.iz),
                (&ops.iy, &ops.iz, &ops.ix),
                (&ops.iz, &ops.ix, &ops.iy),
            ];
            for (a, b, c) in pairs {
                let comm = commutator(a, b).unwrap();
                let expect = c.scale(C64::new(0.0, 1.0));
                assert!(
                    max_abs_diff(comm.matrix(), expect.matrix()) < 1e-13,
                    "su(2) failure at two_i={two_i}"
                );
            }
        }
    }

    #[test]
    fn casimir_identity() {
        for two_i in [1, 3, 7] {
            let s = spin(two_i);
            let ops = SpinOperators::new(s);
            let sum = ops
                .ix
                .mul(&ops.ix)
                .add(&ops.iy.mul(&ops.iy))
                .add(&ops.iz.mul(&ops.iz));
            assert!(max_abs_diff(sum.matrix(), ops.isq.matrix()) < 1e-13);
        }
    }

    #[test]
    fn tensor_basis_spin_half_t10() {
        let basis = TensorBasis::new(spin(1));
        let t10 = basis.get(1, 0);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert!((t10.matrix()[[0, 0]].re - inv_sqrt2).abs() < 1e-14);
        assert!((t10.matrix()[[1, 1]].re + inv_sqrt2).abs() < 1e-14);
        assert!(t10.matrix()[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn tensor_basis_orthonormal_and_complete() {
        for two_i in [1, 3, 7] {
            let s = spin(two_i);
            let basis = TensorBasis::new(s);
            let d = s.dimension();
            assert_eq!(basis.len(), d * d);
            for (i, (_, _, ti)) in basis.iter().enumerate() {
                for (j, (_, _, tj)) in basis.iter().enumerate() {
                    let gram = linalg::trace(&linalg::dagger(ti.matrix()).dot(tj.matrix()));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (gram - C64::new(want, 0.0)).norm() < 1e-12,
                        "two_i={two_i} gram ({i},{j}) = {gram}"
                    );
                }
            }
        }
    }

    #[test]
    fn tensor_basis_t00_is_normalized_identity() {
        for two_i in [1, 3, 7] {
            let s = spin(two_i);
            let basis = TensorBasis::new(s);
            let want = Operator::identity(s).scale_re(1.0 / (s.dimension() as f64).sqrt());
            assert!(max_abs_diff(basis.get(0, 0).matrix(), want.matrix()) < 1e-14);
        }
    }

    #[test]
    fn tensor_basis_coherence_grading() {
        for two_i in [3, 7] {
            let s = spin(two_i);
            let ops = SpinOperators::new(s);
            let basis = TensorBasis::new(s);
            for (l, m, t) in basis.iter() {
                let comm = commutator(&ops.iz, t).unwrap();
                let expect = t.scale_re(m as f64);
                assert!(
                    max_abs_diff(comm.matrix(), expect.matrix()) < 1e-13,
                    "grading failure at two_i={two_i} l={l} m={m}"
                );
            }
        }
    }

    #[test]
    fn tensor_basis_adjoint_symmetry() {
        for two_i in [3, 7] {
            let basis = TensorBasis::new(spin(two_i));
            for (l, m, t) in basis.iter() {
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let expect = basis.get(l, -m).scale_re(sign);
                assert!(
                    max_abs_diff(t.dagger().matrix(), expect.matrix()) < 1e-13,
                    "adjoint failure at two_i={two_i} l={l} m={m}"
                );
            }
        }
    }

    #[test]
    fn tensor_commutator_iz_t21() {
        let s = spin(3);
        let ops = SpinOperators::new(s);
        let basis = TensorBasis::new(s);
        let t21 = basis.get(2, 1);
        let comm = commutator(&ops.iz, t21).unwrap();
        assert!(max_abs_diff(comm.matrix(), t21.matrix()) < 1e-13);
    }

    #[test]
    fn quadrupole_rejects_spin_half() {
        assert!(matches!(
            QuadrupoleTensors::new(spin(1)),
            Err(SpinError::NoQuadrupole)
        ));
    }

    #[test]
    fn quadrupole_q0_spin_three_half() {
        let q = QuadrupoleTensors::new(spin(3)).unwrap();
        let expected = [3.0, -3.0, -3.0, 3.0];
        for (k, want) in expected.iter().enumerate() {
            assert!((q.get(0).matrix()[[k, k]].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn quadrupole_adjoint_and_grading() {
        for two_i in [2, 3, 5, 7] {
            let s = spin(two_i);
            let ops = SpinOperators::new(s);
            let q = QuadrupoleTensors::new(s).unwrap();
            for p in -2..=2i32 {
                let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let adj = q.get(p).dagger();
                let want = q.get(-p).scale_re(sign);
                assert!(
                    max_abs_diff(adj.matrix(), want.matrix()) < 1e-14,
                    "Q adjoint failure two_i={two_i} p={p}"
                );
                let comm = commutator(&ops.iz, q.get(p)).unwrap();
                let graded = q.get(p).scale_re(p as f64);
                assert!(
                    max_abs_diff(comm.matrix(), graded.matrix()) < 1e-13,
                    "Q grading failure two_i={two_i} p={p}"
                );
            }
        }
    }

    #[test]
    fn coherent_state_poles() {
        let s = spin(3);
        // θ = 0 is |I, −I⟩, the last basis state.
        let down = coherent_state(s, &CoherentStateParams::new(0.0, 0.0));
        assert!((down.matrix()[[3, 3]].re - 1.0).abs() < 1e-14);
        // θ = π is the analytic limit |I, +I⟩.
        let up = coherent_state(s, &CoherentStateParams::new(std::f64::consts::PI, 0.3));
        assert!((up.matrix()[[0, 0]].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coherent_state_equatorial_amplitudes() {
        let s = spin(3);
        let rho = coherent_state(s, &CoherentStateParams::new(std::f64::consts::FRAC_PI_2, 0.0));
        // Amplitudes (0.35355, 0.61237, 0.61237, 0.35355) on m = 3/2…−3/2.
        let want = [0.35355339059327373, 0.6123724356957945];
        for (k, amp) in [want[0], want[1], want[1], want[0]].iter().enumerate() {
            let diag = rho.matrix()[[k, k]].re;
            assert!((diag - amp * amp).abs() < 1e-13);
        }
        let ops = SpinOperators::new(s);
        assert!((expectation_real(&rho, &ops.ix).unwrap() - 1.5).abs() < 1e-13);
        assert!((rho.purity() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn coherent_state_spin_seven_half_moments() {
        let s = spin(7);
        let rho = coherent_state(s, &CoherentStateParams::new(std::f64::consts::FRAC_PI_2, 0.0));
        let ops = SpinOperators::new(s);
        assert!((expectation_real(&rho, &ops.ix).unwrap() - 3.5).abs() < 1e-13);
        assert!(expectation_real(&rho, &ops.iy).unwrap().abs() < 1e-13);
        assert!(expectation_real(&rho, &ops.iz).unwrap().abs() < 1e-13);
        assert!((variance(&rho, &ops.iy).unwrap() - 1.75).abs() < 1e-13);
        assert!((variance(&rho, &ops.iz).unwrap() - 1.75).abs() < 1e-13);
    }

    #[test]
    fn coherent_state_mean_direction_norm() {
        for two_i in [3, 7] {
            let s = spin(two_i);
            let i = s.quantum_number();
            let ops = SpinOperators::new(s);
            for a in 0..5 {
                for b in 0..5 {
                    let theta = std::f64::consts::PI * a as f64 / 4.0;
                    let phi = std::f64::consts::TAU * b as f64 / 5.0;
                    let rho = coherent_state(s, &CoherentStateParams::new(theta, phi));
                    let mx = expectation_real(&rho, &ops.ix).unwrap();
                    let my = expectation_real(&rho, &ops.iy).unwrap();
                    let mz = expectation_real(&rho, &ops.iz).unwrap();
                    let norm = (mx * mx + my * my + mz * mz).sqrt();
                    assert!(
                        (norm - i).abs() < 1e-12,
                        "two_i={two_i} θ={theta} φ={phi}: |⟨I⟩| = {norm}"
                    );
                }
            }
        }
    }

    #[test]
    fn expectation_on_maximally_mixed() {
        let s = spin(3);
        let ops = SpinOperators::new(s);
        let rho = DensityMatrix::new(Operator::identity(s).scale_re(0.25)).unwrap();
        assert!(expectation_real(&rho, &ops.iz).unwrap().abs() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let rho = coherent_state(spin(3), &CoherentStateParams::new(0.1, 0.2));
        let ops = SpinOperators::new(spin(7));
        assert!(expectation(&rho, &ops.iz).is_err());
    }

    #[test]
    fn variance_of_eigenstate_is_zero() {
        let s = spin(3);
        let ops = SpinOperators::new(s);
        let rho = coherent_state(s, &CoherentStateParams::new(0.0, 0.0));
        assert!(variance(&rho, &ops.iz).unwrap().abs() < 1e-14);
    }

    #[test]
    fn variance_rejects_non_hermitian() {
        let s = spin(3);
        let ops = SpinOperators::new(s);
        let rho = coherent_state(s, &CoherentStateParams::new(1.0, 0.0));
        assert!(matches!(
            variance(&rho, &ops.iplus),
            Err(SpinError::NonHermitian { .. })
        ));
    }

    #[test]
    fn density_matrix_validation_rejects_bad_inputs() {
        let s = spin(1);
        // Non-unit trace.
        let op = Operator::identity(s);
        assert!(matches!(
            DensityMatrix::new(op),
            Err(SpinError::InvalidDensity { check: "unit trace", .. })
        ));
        // Negative eigenvalue.
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(1.5, 0.0);
        m[[1, 1]] = C64::new(-0.5, 0.0);
        let op = Operator::new(s, m).unwrap();
        assert!(matches!(
            DensityMatrix::new(op),
            Err(SpinError::InvalidDensity { check: "positivity", .. })
        ));
    }
}
