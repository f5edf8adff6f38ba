//! Derived quantities: the squeezing parameter and angle, non-Cartesian
//! angular-momentum operators and their uncertainty products, the
//! macroscopicity measure, and the closed-form thermal-equilibrium bounds.

use thiserror::Error;

use crate::spin::{
    expectation_real, second_moment, variance, DensityMatrix, Operator, SpinError, SpinNumber,
    SpinOperators,
};

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error("squeezing radicand {value:.3e} is negative beyond roundoff; upstream state is corrupt")]
    NegativeRadicand { value: f64 },
    #[error(
        "uncertainty product {product:.6e} violates the Robertson bound {bound:.6e} beyond slack"
    )]
    UncertaintyViolation { product: f64, bound: f64 },
}

/// Squeezing parameter data for one state.
///
/// `a` = ⟨Iz² − Iy²⟩, `b` = ⟨Iz Iy + Iy Iz⟩, `c` = ⟨Iz² + Iy²⟩ are the
/// transverse second-moment combinations for a mean spin along x;
/// ξ² = (C − √(A²+B²))/I so that ξ < 1 signals squeezing below the
/// coherent-state limit √(I/2).
#[derive(Debug, Clone, Copy)]
pub struct SqueezingResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub xi: f64,
    pub xi_squared: f64,
    /// Squeezing orientation ½·arctan(B/A) on the principal branch
    /// (−π/4, π/4], evaluated in two-argument form; 0 when A = B = 0.
    pub alpha: f64,
    /// True when A and B both vanish (isotropic transverse variance), in
    /// which case `alpha` is 0 by convention.
    pub degenerate: bool,
}

impl SqueezingResult {
    /// Angle of the transverse axis minimizing the second moment
    /// ⟨(Iy cos φ − Iz sin φ)²⟩, from the full two-argument arctangent.
    /// Equals `alpha` up to a multiple of π/2.
    pub fn minimizing_axis_angle(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            0.5 * self.b.atan2(self.a)
        }
    }
}

/// Variance products against the Robertson bound for one state.
#[derive(Debug, Clone, Copy)]
pub struct UncertaintyReport {
    pub var_iy: f64,
    pub var_iz: f64,
    pub var_ip: f64,
    pub var_im: f64,
    pub prod_yz: f64,
    pub prod_pm: f64,
    pub bound: f64,
    pub mean_ix: f64,
    pub mean_iy: f64,
    pub mean_iz: f64,
}

/// Effective-size measure N_eff = (2/I)·Var(O).
#[derive(Debug, Clone)]
pub struct MacroscopicityResult {
    pub n_eff: f64,
    pub operator_label: String,
}

/// Closed-form thermal-equilibrium values as functions of the spin number.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumBounds {
    /// ξ²_eq = 2(I+1)/3, also the equilibrium macroscopicity N_eff(ρ_eq).
    pub xi_sq_eq: f64,
    /// (ΔIy·ΔIz)_eq = (I+1)√((2I−1)I)/(3√3).
    pub prod_eq: f64,
    /// Macroscopicity loss 2I − 2(I+1)/3 = 2(2I−1)/3.
    pub n_eff_loss: f64,
}

const RADICAND_SLACK: f64 = 1e-10;
const ROBERTSON_SLACK: f64 = 1e-9;
const DEGENERATE_SCALE: f64 = 1e-12;

/// Squeezing parameter ξ and orientation α for a state whose mean spin is
/// prepared along x.
pub fn squeezing(rho: &DensityMatrix) -> Result<SqueezingResult, ObservableError> {
    let ops = SpinOperators::new(rho.spin());
    let iy2 = expectation_real(rho, &ops.iy.mul(&ops.iy))?;
    let iz2 = expectation_real(rho, &ops.iz.mul(&ops.iz))?;
    let cross = expectation_real(rho, &ops.iz.mul(&ops.iy).add(&ops.iy.mul(&ops.iz)))?;

    let a = iz2 - iy2;
    let b = cross;
    let c = iz2 + iy2;
    let hypot = a.hypot(b);
    let radicand = c - hypot;
    if radicand < -RADICAND_SLACK {
        return Err(ObservableError::NegativeRadicand { value: radicand });
    }
    let i = rho.spin().quantum_number();
    let xi_squared = radicand.max(0.0) / i;
    let xi = xi_squared.sqrt();

    let degenerate = hypot <= DEGENERATE_SCALE * c.abs().max(1.0);
    let alpha = if degenerate {
        0.0
    } else {
        principal_half_angle(b, a)
    };

    Ok(SqueezingResult {
        a,
        b,
        c,
        xi,
        xi_squared,
        alpha,
        degenerate,
    })
}

/// ½·arctan(b/a) evaluated via atan2 and reduced to the principal branch
/// (−π/4, π/4]. The reduction by π/2 keeps the angle continuous through
/// A = 0 and matches the branch on which I_p carries the dominant variance
/// of the cat state.
fn principal_half_angle(b: f64, a: f64) -> f64 {
    let mut angle = b.atan2(a);
    if angle > std::f64::consts::FRAC_PI_2 {
        angle -= std::f64::consts::PI;
    } else if angle <= -std::f64::consts::FRAC_PI_2 {
        angle += std::f64::consts::PI;
    }
    0.5 * angle
}

/// The rotated transverse operators
/// I_p = Iy cos α − Iz sin α and I_m = −Iy sin α − Iz cos α.
pub fn noncartesian_operators(spin: SpinNumber, alpha: f64) -> (Operator, Operator) {
    let ops = SpinOperators::new(spin);
    let ip = ops
        .iy
        .scale_re(alpha.cos())
        .sub(&ops.iz.scale_re(alpha.sin()));
    let im = ops
        .iy
        .scale_re(-alpha.sin())
        .sub(&ops.iz.scale_re(alpha.cos()));
    (ip, im)
}

/// Variances, uncertainty products, and the Robertson bound |⟨Ix⟩|/2 for
/// both the Cartesian (Iy, Iz) and rotated (I_p, I_m) pairs.
pub fn uncertainty_report(
    rho: &DensityMatrix,
    alpha: f64,
) -> Result<UncertaintyReport, ObservableError> {
    let ops = SpinOperators::new(rho.spin());
    let (ip, im) = noncartesian_operators(rho.spin(), alpha);

    let report = UncertaintyReport {
        var_iy: variance(rho, &ops.iy)?,
        var_iz: variance(rho, &ops.iz)?,
        var_ip: variance(rho, &ip)?,
        var_im: variance(rho, &im)?,
        prod_yz: 0.0,
        prod_pm: 0.0,
        bound: expectation_real(rho, &ops.ix)?.abs() / 2.0,
        mean_ix: expectation_real(rho, &ops.ix)?,
        mean_iy: expectation_real(rho, &ops.iy)?,
        mean_iz: expectation_real(rho, &ops.iz)?,
    };
    let report = UncertaintyReport {
        prod_yz: (report.var_iy * report.var_iz).sqrt(),
        prod_pm: (report.var_ip * report.var_im).sqrt(),
        ..report
    };

    for product in [report.prod_yz, report.prod_pm] {
        if product < report.bound - ROBERTSON_SLACK {
            return Err(ObservableError::UncertaintyViolation {
                product,
                bound: report.bound,
            });
        }
    }
    Ok(report)
}

/// Macroscopicity N_eff = (2/I)·(⟨O²⟩ − ⟨O⟩²) for a Hermitian operator.
pub fn macroscopicity(
    rho: &DensityMatrix,
    op: &Operator,
    label: impl Into<String>,
) -> Result<MacroscopicityResult, ObservableError> {
    let i = rho.spin().quantum_number();
    let n_eff = 2.0 / i * variance(rho, op)?;
    Ok(MacroscopicityResult {
        n_eff,
        operator_label: label.into(),
    })
}

/// Closed-form equilibrium bounds for the squeezing parameter, the
/// uncertainty product, and the macroscopicity loss.
pub fn equilibrium_bounds(spin: SpinNumber) -> EquilibriumBounds {
    let i = spin.quantum_number();
    EquilibriumBounds {
        xi_sq_eq: 2.0 * (i + 1.0) / 3.0,
        prod_eq: (i + 1.0) * ((2.0 * i - 1.0) * i).sqrt() / (3.0 * 3.0f64.sqrt()),
        n_eff_loss: 2.0 * (2.0 * i - 1.0) / 3.0,
    }
}

/// Second moment ⟨(Iy cos φ − Iz sin φ)²⟩ of the transverse projection at
/// angle φ; the closed-form minimum over φ is (C − √(A²+B²))/2.
pub fn transverse_second_moment(rho: &DensityMatrix, phi: f64) -> Result<f64, ObservableError> {
    let (ip, _) = noncartesian_operators(rho.spin(), phi);
    Ok(second_moment(rho, &ip)?)
}
