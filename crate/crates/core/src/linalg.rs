//! Fixed-size complex linear algebra for the four-level problem.
//!
//! Everything here works on 4×4 complex matrices: scaling-and-squaring
//! matrix exponentials (general, and `exp(−iS)` for real symmetric `S`), a cyclic Jacobi eigensolver for Hermitian matrices,
//! and a handful of norms used by the checks elsewhere in the crate.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix4c = Matrix4<Complex64>;
pub type Vector4c = Vector4<Complex64>;
pub type Matrix2c = Matrix2<Complex64>;
pub type Matrix4r = Matrix4<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest 1-norm the Taylor series is evaluated at before squaring.
const EXPM_SCALED_NORM: f64 = 0.5;
const EXPM_MAX_TERMS: usize = 40;

const JACOBI_MAX_SWEEPS: usize = 30;
const JACOBI_OFF_TOLERANCE: f64 = 1e-13;
const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn one_norm(a: &Matrix4c) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius_norm(a: &Matrix4c) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix4c) -> f64 {
    a.svd(false, false).singular_values.max()
}

/// Largest entry of `|A - A†|`.
pub fn hermitian_error(a: &Matrix4c) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|U†U - 1|`.
pub fn unitarity_error(u: &Matrix4c) -> f64 {
    let gram = u.adjoint() * u - Matrix4c::identity();
    gram.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral-norm distance between `a` and `b` after removing the global
/// phase that best aligns `b` onto `a`.
pub fn phase_aligned_distance(a: &Matrix4c, b: &Matrix4c) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    spectral_norm(&(a - b * phase))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The series length is fixed from the 1-norm of the scaled argument so the
/// first dropped term is below a quarter ulp of unity; evaluation is Horner
/// style, one product per term.
pub fn expm(a: &Matrix4c) -> Matrix4c {
    let norm = one_norm(a);
    let squarings = if norm > EXPM_SCALED_NORM {
        (norm / EXPM_SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    let scaled = a * c64(scale, 0.0);
    let scaled_norm = norm * scale;

    let mut terms = 0;
    let mut bound = 1.0;
    while terms < EXPM_MAX_TERMS && bound > 0.25 * f64::EPSILON {
        terms += 1;
        bound *= scaled_norm / terms as f64;
    }

    let identity = Matrix4c::identity();
    let mut result = identity;
    for k in (1..=terms).rev() {
        result = identity + scaled * result * c64(1.0 / k as f64, 0.0);
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

/// `exp(−iS)` for real symmetric `S`, assembled as `cos S − i sin S` from
/// real Taylor series in `S²`.
///
/// Same accuracy target as [`expm`] at roughly a quarter of the work, which
/// matters in the time-stepping loop where `S = H dt` is real.
pub fn expm_neg_i_symmetric(s: &Matrix4r) -> Matrix4c {
    let norm = s.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    let squarings = if norm > EXPM_SCALED_NORM {
        (norm / EXPM_SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = s * 0.5f64.powi(squarings);
    let scaled_norm = norm * 0.5f64.powi(squarings);

    // pairs of terms (S^{2k}, S^{2k+1}) kept until S^{2m+2}/(2m+2)! is negligible
    let mut pairs = 0;
    let mut bound = 1.0;
    loop {
        let n = 2 * pairs + 2;
        bound *= scaled_norm * scaled_norm / ((n - 1) * n) as f64;
        if bound <= 0.25 * f64::EPSILON || n >= EXPM_MAX_TERMS {
            break;
        }
        pairs += 1;
    }

    let identity = Matrix4r::identity();
    let t = scaled * scaled;
    let mut cos = identity;
    let mut sin = identity;
    for k in (1..=pairs).rev() {
        let (a, b) = ((2 * k - 1) as f64, (2 * k) as f64);
        cos = identity - t * cos / (a * b);
        sin = identity - t * sin / (b * (b + 1.0));
    }
    let sin = scaled * sin;
    let mut result = Matrix4c::from_fn(|i, j| c64(cos[(i, j)], -sin[(i, j)]));
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
/// Hermitian 4×4 matrix.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: [f64; 4],
    pub vectors: Matrix4c,
}

impl Eigendecomposition {
    pub fn vector(&self, k: usize) -> Vector4c {
        self.vectors.column(k).into_owned()
    }
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot element with a
/// diagonal unitary and then applies the real symmetric Jacobi rotation.
/// Iteration stops once the off-diagonal Frobenius norm drops below
/// `1e-13·‖H‖_F`, or fails after 30 sweeps.
pub fn numeric_diagonalize(h: &Matrix4c) -> Result<Eigendecomposition> {
    let scale = frobenius_norm(h);
    if !scale.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let asym = hermitian_error(h);
    if asym > HERMITIAN_TOLERANCE * scale.max(1.0) {
        return Err(Error::ContractViolation(format!(
            "matrix is not Hermitian (|H - H†| = {asym:e})"
        )));
    }

    let mut a = (h + h.adjoint()) * c64(0.5, 0.0);
    let mut v = Matrix4c::identity();
    let threshold = JACOBI_OFF_TOLERANCE * scale;

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;

                let mut rot = Matrix4c::identity();
                rot[(p, p)] = c64(cos, 0.0);
                rot[(p, q)] = c64(sin, 0.0);
                rot[(q, p)] = -phase.conj() * sin;
                rot[(q, q)] = phase.conj() * cos;

                a = rot.adjoint() * a * rot;
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                v *= rot;
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > threshold {
        return Err(Error::NotConverged {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm: off,
        });
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let mut values = [0.0; 4];
    let mut vectors = Matrix4c::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = a[(src, src)].re;
        vectors.set_column(k, &v.column(src));
    }
    Ok(Eigendecomposition { values, vectors })
}

fn off_diagonal_norm(a: &Matrix4c) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, scale: f64) -> Matrix4c {
        let mut h = Matrix4c::zeros();
        for i in 0..4 {
            h[(i, i)] = c64(rng.gen_range(-scale..scale), 0.0);
            for j in (i + 1)..4 {
                let z = c64(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    #[test]
    fn diagonal_input_is_returned_unchanged() {
        let h = Matrix4c::from_diagonal(&Vector4c::new(
            c64(1.0, 0.0),
            c64(2.0, 0.0),
            c64(3.0, 0.0),
            c64(4.0, 0.0),
        ));
        let eig = numeric_diagonalize(&h).unwrap();
        assert_eq!(eig.values, [1.0, 2.0, 3.0, 4.0]);
        assert!((eig.vectors - Matrix4c::identity()).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_matrix() {
        let eig = numeric_diagonalize(&Matrix4c::zeros()).unwrap();
        assert_eq!(eig.values, [0.0; 4]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = Matrix4c::identity();
        h[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(
            numeric_diagonalize(&h),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn random_hermitian_residuals_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng, 10.0);
            let eig = numeric_diagonalize(&h).unwrap();
            let norm = spectral_norm(&h);
            let trace = h.trace().re;
            let sum: f64 = eig.values.iter().sum();
            assert!((trace - sum).abs() <= 1e-9, "{trace} vs {sum}");
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(unitarity_error(&eig.vectors) < 1e-12);
            for k in 0..4 {
                let v = eig.vector(k);
                let residual = (h * v - v * c64(eig.values[k], 0.0)).norm();
                assert!(residual <= 1e-9 * norm);
            }
        }
    }

    #[test]
    fn symmetric_exponential_matches_general() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for scale in [1e-3, 0.04, 0.7, 5.0, 60.0] {
            let mut s = Matrix4r::from_fn(|_, _| rng.gen_range(-1.0..1.0) * scale);
            s = (s + s.transpose()) * 0.5;
            let general = expm(&s.map(|x| c64(0.0, -x)));
            let fast = expm_neg_i_symmetric(&s);
            assert!(frobenius_norm(&(general - fast)) < 1e-13 * scale.max(1.0), "scale {scale}");
        }
    }

    #[test]
    fn expm_matches_spectral_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 3.0);
            let t = rng.gen_range(0.0..5.0);
            let direct = expm(&(h * c64(0.0, -t)));

            let eig = numeric_diagonalize(&h).unwrap();
            let phases = Matrix4c::from_diagonal(&Vector4c::from_iterator(
                eig.values.iter().map(|&e| c64(0.0, -e * t).exp()),
            ));
            let spectral = eig.vectors * phases * eig.vectors.adjoint();
            assert!(frobenius_norm(&(direct - spectral)) < 1e-11);
            assert!(unitarity_error(&direct) < 1e-12);
        }
    }

    #[test]
    fn expm_of_pauli_x_rotation() {
        // exp(-i a σx) on the (0,1) block = cos a - i sin a σx
        let a = 1.3;
        let mut g = Matrix4c::zeros();
        g[(0, 1)] = c64(0.0, -a);
        g[(1, 0)] = c64(0.0, -a);
        let u = expm(&g);
        assert!((u[(0, 0)] - c64(a.cos(), 0.0)).norm() < 1e-15);
        assert!((u[(0, 1)] - c64(0.0, -a.sin())).norm() < 1e-15);
        assert!((u[(2, 2)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn aligned_distance_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 1.0);
        let u = expm(&(h * c64(0.0, -1.0)));
        let rotated = u * c64(0.0, 0.7).exp();
        assert!(phase_aligned_distance(&rotated, &u) < 1e-12);
        assert!(phase_aligned_distance(&u, &Matrix4c::identity()) > 1e-3);
    }
}
