//! Matrix exponential via scaling and squaring with diagonal Padé approximants.
//!
//! Follows Higham, "The Scaling and Squaring Method for the Matrix
//! Exponential Revisited" (SIAM J. Matrix Anal. Appl., 2005): pick the lowest
//! Padé degree m ∈ {3, 5, 7, 9, 13} whose 1-norm bound θ_m admits the matrix,
//! otherwise scale by 2^-s into the degree-13 region and square back.

use nalgebra::{DMatrix, Matrix4};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
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

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(U, V)` for the low-degree approximants, built from even powers of `a`.
fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = DMatrix::identity(n, n);
    let mut odd = DMatrix::zeros(n, n);
    let mut even = DMatrix::zeros(n, n);
    for k in (0..b.len()).step_by(2) {
        even += &power * b[k];
        if k + 1 < b.len() {
            odd += &power * b[k + 1];
        }
        power = &power * &a2;
    }
    (a * odd, even)
}

fn pade13(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let b = &B13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

/// `exp(a)` for a square matrix.
///
/// # Panics
/// Panics if `a` is not square or the Padé denominator is singular, which
/// cannot happen for finite input within the θ_m bounds.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = one_norm(a);

    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(a, &B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_low(a, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_low(a, &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_low(a, &B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scaled = a * 2f64.powi(-s);
        let (u, v) = pade13(&scaled);
        (u, v, s)
    };

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is singular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// `exp(A t)` for the 4×4 closed-loop matrix.
pub fn matrix_exponential(a: &Matrix4<f64>, t: f64) -> Matrix4<f64> {
    let dyn_a = DMatrix::from_iterator(4, 4, a.iter().map(|v| v * t));
    let e = expm(&dyn_a);
    Matrix4::from_iterator(e.iter().copied())
}

/// `(exp(A h), ∫₀ʰ exp(A τ) dτ)` from one exponential of the block matrix
/// `[[A h, I h], [0, 0]]`.
pub fn discretize(a: &Matrix4<f64>, h: f64) -> (Matrix4<f64>, Matrix4<f64>) {
    let mut m = DMatrix::<f64>::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = a[(i, j)] * h;
        }
        m[(i, 4 + i)] = h;
    }
    let e = expm(&m);
    let phi = Matrix4::from_fn(|i, j| e[(i, j)]);
    let gamma = Matrix4::from_fn(|i, j| e[(i, 4 + j)]);
    (phi, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm(&z), DMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        // one entry per Padé branch and one that needs squaring
        let d = [1e-3, 0.2, 0.9, 2.0, 40.0, -35.0];
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
        let e = expm(&a);
        for (i, v) in d.iter().enumerate() {
            assert!((e[(i, i)] - v.exp()).abs() <= 1e-13 * v.exp().max(1.0), "entry {i}");
        }
    }

    #[test]
    fn rotation_generator() {
        for t in [0.01_f64, 0.5, 1.3, 3.0, 12.0] {
            let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
            let want = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
            assert!(rel_err(&expm(&a), &want) < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn nilpotent_jordan_block() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(rel_err(&expm(&a), &want) < 1e-15);
    }

    #[test]
    fn discretize_integrates_a_scalar_mode() {
        let a = Matrix4::from_diagonal(&nalgebra::Vector4::new(-2.0, 0.0, 0.5, -12.0));
        let h = 0.3;
        let (phi, gamma) = discretize(&a, h);
        for (i, l) in [-2.0_f64, 0.0, 0.5, -12.0].iter().enumerate() {
            let want_gamma = if *l == 0.0 { h } else { ((l * h).exp() - 1.0) / l };
            assert!((phi[(i, i)] - (l * h).exp()).abs() < 1e-15);
            assert!((gamma[(i, i)] - want_gamma).abs() < 1e-15);
        }
    }
}
