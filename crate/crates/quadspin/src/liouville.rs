//! Coherent Hamiltonians, the quadrupolar Redfield relaxation superoperator
//! in Schrödinger-picture form, and the high-temperature equilibrium state.

use ndarray::Array2;
use thiserror::Error;

use crate::linalg::{self, C64};
use crate::spin::{DensityMatrix, Operator, QuadrupoleTensors, SpinError, SpinNumber, SpinOperators};

#[derive(Debug, Error)]
pub enum LiouvilleError {
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error("relaxation parameter {name} must be positive (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("quadrupolar constant c_q must be non-negative (got {value})")]
    NegativeCq { value: f64 },
}

/// Spectral densities and coupling constants driving quadrupolar relaxation.
///
/// `j0`, `j1`, `j2` are the spectral densities J(pω) in seconds for
/// p = 0, 1, 2; negative p reuses J(|p|ω) by the even-parity convention.
/// `c_q` is the overall relaxation strength in Hz² and `omega_q` the
/// quadrupolar angular frequency in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationParams {
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    pub c_q: f64,
    pub omega_q: f64,
    pub label: String,
}

impl RelaxationParams {
    pub fn new(
        j0: f64,
        j1: f64,
        j2: f64,
        c_q: f64,
        omega_q: f64,
        label: impl Into<String>,
    ) -> Result<Self, LiouvilleError> {
        for (name, value) in [("j0", j0), ("j1", j1), ("j2", j2), ("omega_q", omega_q)] {
            if value.is_nan() || value <= 0.0 {
                return Err(LiouvilleError::NonPositiveParameter { name, value });
            }
        }
        if c_q.is_nan() || c_q < 0.0 {
            return Err(LiouvilleError::NegativeCq { value: c_q });
        }
        Ok(Self {
            j0,
            j1,
            j2,
            c_q,
            omega_q,
            label: label.into(),
        })
    }

    /// Construct from tabulated units: spectral densities in ns, C_Q in Hz²,
    /// and the quadrupolar frequency ν_Q = ω_Q/2π in Hz. This is the single
    /// conversion path shared by presets and configuration files, so values
    /// round-trip bit exactly.
    pub fn from_table_units(
        j0_ns: f64,
        j1_ns: f64,
        j2_ns: f64,
        c_q_hz2: f64,
        nu_q_hz: f64,
        label: impl Into<String>,
    ) -> Result<Self, LiouvilleError> {
        Self::new(
            j0_ns * 1e-9,
            j1_ns * 1e-9,
            j2_ns * 1e-9,
            c_q_hz2,
            std::f64::consts::TAU * nu_q_hz,
            label,
        )
    }

    /// ²³Na in sodium dodecyl sulfate: spin 3/2, J₀ = 14 ns, J₁ = 4 ns,
    /// J₂ = 3.4 ns, C_Q = 1.2·10¹⁰ Hz², ω_Q/2π = 16700 Hz.
    pub fn sodium_na23() -> Self {
        Self::from_table_units(14.0, 4.0, 3.4, 1.2e10, 16_700.0, "na23")
            .expect("preset values are valid")
    }

    /// ¹³³Cs in cesium pentadecafluorooctanoate: spin 7/2, J₀ = 590 ns,
    /// J₁ = 27 ns, J₂ = 1.28 ns, C_Q = 9.9·10⁶ Hz², ω_Q/2π = 5970 Hz.
    pub fn cesium_cs133() -> Self {
        Self::from_table_units(590.0, 27.0, 1.28, 9.9e6, 5_970.0, "cs133")
            .expect("preset values are valid")
    }

    /// J(pω) with the even-parity lookup J_{|p|}.
    pub fn spectral_density(&self, p: i32) -> f64 {
        match p.abs() {
            0 => self.j0,
            1 => self.j1,
            2 => self.j2,
            _ => unreachable!("quadrupolar tensors carry |p| <= 2"),
        }
    }

    /// Quadrupolar period ν_Q⁻¹ = 2π/ω_Q in seconds.
    pub fn quadrupolar_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_q
    }
}

/// A d²×d² matrix acting on column-vectorized operators.
#[derive(Debug, Clone)]
pub struct Superoperator {
    spin: SpinNumber,
    matrix: Array2<C64>,
}

impl Superoperator {
    pub fn spin(&self) -> SpinNumber {
        self.spin
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Apply to an operator-valued argument.
    pub fn apply(&self, x: &Array2<C64>) -> Array2<C64> {
        let d = self.spin.dimension();
        linalg::unvectorize(&self.matrix.dot(&linalg::vectorize(x)), d)
    }
}

/// Laboratory-frame Hamiltonian
/// H = −(ω_L − ω_rf)·Iz + (ω_Q/6)(3Iz² − I²), in rad/s with ħ = 1.
pub fn lab_hamiltonian(spin: SpinNumber, omega_l: f64, omega_rf: f64, omega_q: f64) -> Operator {
    let ops = SpinOperators::new(spin);
    let zeeman = ops.iz.scale_re(-(omega_l - omega_rf));
    let quad = ops
        .iz
        .mul(&ops.iz)
        .scale_re(3.0)
        .sub(&ops.isq)
        .scale_re(omega_q / 6.0);
    zeeman.add(&quad)
}

/// One-axis-twisting Hamiltonian H = (ω_Q/2)·Iz².
///
/// On resonance this differs from [`lab_hamiltonian`] only by the constant
/// −(ω_Q/6)·I(I+1)·1, a global phase that cancels in density-matrix
/// evolution.
pub fn twisting_hamiltonian(spin: SpinNumber, omega_q: f64) -> Operator {
    let ops = SpinOperators::new(spin);
    ops.iz.mul(&ops.iz).scale_re(omega_q / 2.0)
}

/// Redfield relaxation superoperator in Schrödinger form,
///
///   R[X] = −C_Q Σ_{p=−2}^{2} (−1)^p J_{|p|} [[X, Q⁽ᵖ⁾], Q⁽⁻ᵖ⁾],
///
/// the trace-cyclic adjoint of the tensor-element rate equation
/// d⟨T_{l,m}⟩/dt = −C_Q Σ_p (−1)^p J_p ⟨[Q⁽ᵖ⁾, [Q⁽⁻ᵖ⁾, T_{l,m}]]⟩.
/// Rates come out in s⁻¹ (Hz² × s) with the dimensionless Q tensors.
pub fn relaxation_superoperator(
    spin: SpinNumber,
    params: &RelaxationParams,
) -> Result<Superoperator, LiouvilleError> {
    let q = QuadrupoleTensors::new(spin)?;
    let d = spin.dimension();
    let mut matrix = Array2::<C64>::zeros((d * d, d * d));
    for p in -2..=2i32 {
        let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let weight = -params.c_q * sign * params.spectral_density(p);
        // [[X, Q(p)], Q(-p)] lifts to K_{Q(-p)} · K_{Q(p)} acting on vec(X),
        // reading the nested commutators inside-out as [Q(-p), [Q(p), X]].
        let k_inner = linalg::commutator_superop(q.get(p).matrix());
        let k_outer = linalg::commutator_superop(q.get(-p).matrix());
        matrix = matrix + k_outer.dot(&k_inner) * C64::new(weight, 0.0);
    }
    Ok(Superoperator { spin, matrix })
}

/// High-temperature equilibrium state ρ_eq = (Iz + I·1)/Tr(Iz + I·1),
/// diagonal with populations (I+m)/Σ(I+m) in descending-m order.
pub fn equilibrium_state(spin: SpinNumber) -> DensityMatrix {
    let d = spin.dimension();
    let two_i = spin.two_i() as usize;
    // I + m_k = 2I − k exactly; the normalizer is Σ(2I − k) = 2I(2I+1)/2.
    let total = (two_i * (two_i + 1) / 2) as f64;
    let mut matrix = Array2::<C64>::zeros((d, d));
    for k in 0..d {
        matrix[[k, k]] = C64::new((two_i - k) as f64 / total, 0.0);
    }
    let op = Operator::new(spin, matrix).expect("dimensions match by construction");
    DensityMatrix::new(op).expect("equilibrium state is a valid density matrix")
}
