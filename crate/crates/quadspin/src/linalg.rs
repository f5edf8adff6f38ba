//! Dense complex linear algebra for small matrices.
//!
//! Everything in this crate lives in dimension d ≤ 8 (operators) or
//! d² + 1 ≤ 65 (augmented Liouvillians), so the routines here are plain
//! O(n³) dense algorithms with no external backend: a scaling-and-squaring
//! Padé(13) matrix exponential, Gaussian elimination with partial pivoting,
//! and a cyclic Jacobi eigensolver for Hermitian matrices.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular system encountered in Pade solve (pivot magnitude {pivot:.3e})")]
    SingularPade { pivot: f64 },
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Commutator [a, b] = ab - ba.
pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

/// Anticommutator {a, b} = ab + ba.
pub fn anticommutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) + b.dot(a)
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max column sum of absolute values.
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut max_sum = 0.0f64;
    for j in 0..a.ncols() {
        let col_sum: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        max_sum = max_sum.max(col_sum);
    }
    max_sum
}

/// Deviation from Hermiticity, max |a - a†|.
pub fn hermiticity_residual(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut res = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            res = res.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    res
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Column-major stacking: vec(X)[j*d + i] = X[i, j].
///
/// With this convention vec(A X B) = (Bᵀ ⊗ A) vec(X).
pub fn vectorize(x: &Array2<C64>) -> Array1<C64> {
    let d = x.nrows();
    let mut v = Array1::zeros(d * x.ncols());
    for j in 0..x.ncols() {
        for i in 0..d {
            v[j * d + i] = x[[i, j]];
        }
    }
    v
}

/// Inverse of [`vectorize`] for a square d×d matrix.
pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    let mut x = Array2::zeros((d, d));
    for j in 0..d {
        for i in 0..d {
            x[[i, j]] = v[j * d + i];
        }
    }
    x
}

/// Lift of X ↦ [A, X] onto column-vectorized matrices: 1 ⊗ A − Aᵀ ⊗ 1.
pub fn commutator_superop(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let eye = identity(n);
    kron(&eye, a) - kron(&a.t().to_owned(), &eye)
}

// Padé(13,13) coefficients, Higham (2005) eq. (10.33).
const PADE13_COEFFS: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// theta_13 from Higham Table 10.2.
const THETA_13: f64 = 5.371920351148152;

/// Matrix exponential exp(A) by scaling-and-squaring with a Padé(13)
/// approximant.
pub fn matrix_exp(a: &Array2<C64>) -> Result<Array2<C64>, LinalgError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(LinalgError::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }

    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };

    let scale = C64::new(1.0 / 2f64.powi(s as i32), 0.0);
    let a_scaled = a * scale;
    let mut result = pade13(&a_scaled)?;

    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pade13(a: &Array2<C64>) -> Result<Array2<C64>, LinalgError> {
    let n = a.nrows();
    let eye = identity(n);
    let b = &PADE13_COEFFS;

    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    let w2 = w1.dot(&a6) + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &eye * c(b[1]);
    let u = a.dot(&w2);

    let z1 = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    let v = z1.dot(&a6) + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &eye * c(b[0]);

    // exp(A) ≈ (V - U)⁻¹ (V + U)
    let numerator = &v + &u;
    let denominator = &v - &u;
    solve(denominator, numerator)
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
pub fn solve(a: Array2<C64>, b: Array2<C64>) -> Result<Array2<C64>, LinalgError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(LinalgError::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    let m = b.ncols();
    let mut aug = Array2::<C64>::zeros((n, n + m));
    for i in 0..n {
        for j in 0..n {
            aug[[i, j]] = a[[i, j]];
        }
        for j in 0..m {
            aug[[i, n + j]] = b[[i, j]];
        }
    }

    for col in 0..n {
        let mut max_val = 0.0;
        let mut max_row = col;
        for row in col..n {
            let val = aug[[row, col]].norm();
            if val > max_val {
                max_val = val;
                max_row = row;
            }
        }
        if max_row != col {
            for j in 0..(n + m) {
                let tmp = aug[[col, j]];
                aug[[col, j]] = aug[[max_row, j]];
                aug[[max_row, j]] = tmp;
            }
        }
        let pivot = aug[[col, col]];
        if pivot.norm() < f64::MIN_POSITIVE {
            return Err(LinalgError::SingularPade {
                pivot: pivot.norm(),
            });
        }
        for row in (col + 1)..n {
            let factor = aug[[row, col]] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..(n + m) {
                let val = aug[[col, j]];
                aug[[row, j]] -= factor * val;
            }
        }
    }

    let mut x = Array2::<C64>::zeros((n, m));
    for col in (0..n).rev() {
        let pivot = aug[[col, col]];
        for j in 0..m {
            let mut sum = aug[[col, n + j]];
            for k in (col + 1)..n {
                sum -= aug[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = sum / pivot;
        }
    }
    Ok(x)
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// The input is symmetrized as (A + A†)/2 before iterating, so tiny
/// non-Hermitian roundoff is tolerated.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigenvalues requires a square matrix");
    if n == 0 {
        return Vec::new();
    }
    let mut m = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = (a[[i, j]] + a[[j, i]].conj()) * 0.5;
        }
    }

    let scale = frobenius_norm(&m).max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, p, q);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Annihilate m[p, q] with the unitary U = diag(u, 1) · Givens(θ) acting on
/// the (p, q) plane, applied as m ← U† m U.
fn jacobi_rotate(m: &mut Array2<C64>, p: usize, q: usize) {
    let gamma = m[[p, q]];
    let g = gamma.norm();
    if g < f64::MIN_POSITIVE {
        return;
    }
    let u = gamma / g;
    let alpha = m[[p, p]].re;
    let beta = m[[q, q]].re;
    let tau = (beta - alpha) / (2.0 * g);
    // Small-magnitude root of t² − 2τt − 1 = 0 (the zeroing condition for
    // this Givens convention).
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cos = 1.0 / (1.0 + t * t).sqrt();
    let sin = t * cos;

    let n = m.nrows();
    // Column update: (m U)[:, p] = u c m[:,p] + s m[:,q]; [:, q] = -u s m[:,p] + c m[:,q].
    for i in 0..n {
        let mip = m[[i, p]];
        let miq = m[[i, q]];
        m[[i, p]] = mip * u * cos + miq * sin;
        m[[i, q]] = -mip * u * sin + miq * cos;
    }
    // Row update: (U† m)[p, :] = ū c m[p,:] + s m[q,:]; [q, :] = -ū s m[p,:] + c m[q,:].
    let ubar = u.conj();
    for j in 0..n {
        let mpj = m[[p, j]];
        let mqj = m[[q, j]];
        m[[p, j]] = mpj * ubar * cos + mqj * sin;
        m[[q, j]] = -mpj * ubar * sin + mqj * cos;
    }
    // Clean the tiny residuals left by roundoff.
    m[[p, q]] = C64::new(0.0, 0.0);
    m[[q, p]] = C64::new(0.0, 0.0);
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn smallest_hermitian_eigenvalue(a: &Array2<C64>) -> f64 {
    hermitian_eigenvalues(a)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_complex_matrix(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let a = random_complex_matrix(n, rng);
        (&a + &dagger(&a)) * c(0.5)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let zero = Array2::<C64>::zeros((5, 5));
        let e = matrix_exp(&zero).unwrap();
        assert!(max_abs_diff(&e, &identity(5)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 0]] = C64::new(1.0, 0.0);
        a[[1, 1]] = C64::new(-2.0, 0.5);
        a[[2, 2]] = C64::new(0.0, 3.0);
        let e = matrix_exp(&a).unwrap();
        for i in 0..3 {
            let expected = a[[i, i]].exp();
            assert!((e[[i, i]] - expected).norm() < 1e-13 * expected.norm().max(1.0));
        }
        assert!(e[[0, 1]].norm() < 1e-14);
    }

    #[test]
    fn exp_of_nilpotent_matches_truncated_series() {
        // Strictly upper triangular 3x3: series terminates at A²/2.
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 1]] = C64::new(2.0, 1.0);
        a[[1, 2]] = C64::new(-1.0, 0.5);
        let e = matrix_exp(&a).unwrap();
        let expected = identity(3) + &a + a.dot(&a) * c(0.5);
        assert!(max_abs_diff(&e, &expected) < 1e-14);
    }

    #[test]
    fn exp_antihermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 8, 16] {
            let h = random_hermitian(n, &mut rng);
            let a = &h * C64::new(0.0, 1.0);
            let u = matrix_exp(&a).unwrap();
            let prod = u.dot(&dagger(&u));
            assert!(
                max_abs_diff(&prod, &identity(n)) < 1e-12,
                "n={n} not unitary"
            );
        }
    }

    #[test]
    fn exp_large_norm_needs_scaling() {
        let mut a = Array2::<C64>::zeros((2, 2));
        a[[0, 0]] = C64::new(-300.0, 0.0);
        a[[1, 1]] = C64::new(0.0, 200.0);
        let e = matrix_exp(&a).unwrap();
        assert!((e[[0, 0]].re - (-300.0f64).exp()).abs() < 1e-100);
        let expected = C64::new(0.0, 200.0).exp();
        assert!((e[[1, 1]] - expected).norm() < 1e-10);
    }

    #[test]
    fn exp_semigroup_on_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_complex_matrix(6, &mut rng);
        let e1 = matrix_exp(&a).unwrap();
        let half = &a * c(0.5);
        let eh = matrix_exp(&half).unwrap();
        let e2 = eh.dot(&eh);
        assert!(max_abs_diff(&e1, &e2) < 1e-12);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex_matrix(8, &mut rng);
        let x_true = random_complex_matrix(8, &mut rng);
        let b = a.dot(&x_true);
        let x = solve(a, b).unwrap();
        assert!(max_abs_diff(&x, &x_true) < 1e-11);
    }

    #[test]
    fn kron_vec_identity() {
        // vec(A X B) = (Bᵀ ⊗ A) vec(X), column-major stacking.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_complex_matrix(3, &mut rng);
        let x = random_complex_matrix(3, &mut rng);
        let b = random_complex_matrix(3, &mut rng);
        let lhs = vectorize(&a.dot(&x).dot(&b));
        let lift = kron(&b.t().to_owned(), &a);
        let rhs = lift.dot(&vectorize(&x));
        let diff = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-13);
    }

    #[test]
    fn vectorize_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_complex_matrix(4, &mut rng);
        let back = unvectorize(&vectorize(&x), 4);
        assert!(max_abs_diff(&back, &x) < 1e-16);
    }

    #[test]
    fn commutator_superop_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_complex_matrix(4, &mut rng);
        let x = random_complex_matrix(4, &mut rng);
        let direct = commutator(&a, &x);
        let lifted = unvectorize(&commutator_superop(&a).dot(&vectorize(&x)), 4);
        assert!(max_abs_diff(&direct, &lifted) < 1e-13);
    }

    #[test]
    fn jacobi_diagonal_matrix() {
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 0]] = c(3.0);
        a[[1, 1]] = c(-1.0);
        a[[2, 2]] = c(0.5);
        let eigs = hermitian_eigenvalues(&a);
        assert_eq!(eigs.len(), 3);
        assert!((eigs[0] + 1.0).abs() < 1e-15);
        assert!((eigs[1] - 0.5).abs() < 1e-15);
        assert!((eigs[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_known_two_by_two() {
        // [[0, i], [-i, 0]] has eigenvalues ±1.
        let mut a = Array2::<C64>::zeros((2, 2));
        a[[0, 1]] = C64::new(0.0, 1.0);
        a[[1, 0]] = C64::new(0.0, -1.0);
        let eigs = hermitian_eigenvalues(&a);
        assert!((eigs[0] + 1.0).abs() < 1e-14);
        assert!((eigs[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_recovers_constructed_spectrum() {
        // Conjugate a known diagonal by a product of random complex Givens
        // rotations (exactly unitary), then check the spectrum comes back.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 8;
        let spectrum: Vec<f64> = (0..n).map(|i| (i as f64) - 2.5).collect();
        let mut m = Array2::<C64>::zeros((n, n));
        for (i, &lambda) in spectrum.iter().enumerate() {
            m[[i, i]] = c(lambda);
        }
        for _ in 0..40 {
            let p = rng.random_range(0..n);
            let mut q = rng.random_range(0..n);
            while q == p {
                q = rng.random_range(0..n);
            }
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let (cs, sn) = (theta.cos(), theta.sin());
            let phase = C64::new(0.0, phi).exp();
            // u columns p,q: [c, -s̄·e^{iφ}; s·e^{-iφ}, c] is unitary
            let mut u = identity(n);
            u[[p, p]] = c(cs);
            u[[p, q]] = -phase.conj() * sn;
            u[[q, p]] = phase * sn;
            u[[q, q]] = c(cs);
            m = u.dot(&m).dot(&dagger(&u));
        }
        let eigs = hermitian_eigenvalues(&m);
        for (got, want) in eigs.iter().zip(spectrum.iter()) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn jacobi_trace_invariants_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in [3, 5, 16] {
            let a = random_hermitian(n, &mut rng);
            let eigs = hermitian_eigenvalues(&a);
            let tr: f64 = trace(&a).re;
            let tr2: f64 = a.dot(&a).diag().iter().map(|z| z.re).sum();
            let sum: f64 = eigs.iter().sum();
            let sum2: f64 = eigs.iter().map(|x| x * x).sum();
            assert!((sum - tr).abs() < 1e-11 * tr.abs().max(1.0));
            assert!((sum2 - tr2).abs() < 1e-11 * tr2.abs().max(1.0));
        }
    }
}
