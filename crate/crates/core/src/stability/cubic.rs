use nalgebra::Complex;

/// Monic cubic `λ³ + c2·λ² + c1·λ + c0`, stored as `[c2, c1, c0]`.
pub type Cubic = [f64; 3];

pub fn eval(cubic: &Cubic, x: f64) -> f64 {
    let [c2, c1, c0] = *cubic;
    ((x + c2) * x + c1) * x + c0
}

pub fn eval_complex(cubic: &Cubic, z: Complex<f64>) -> Complex<f64> {
    let [c2, c1, c0] = *cubic;
    ((z + c2) * z + c1) * z + c0
}

fn eval_derivative(cubic: &Cubic, z: Complex<f64>) -> Complex<f64> {
    let [c2, c1, _] = *cubic;
    (z * 3.0 + 2.0 * c2) * z + c1
}

/// A real root by bisection on the Cauchy bound bracket.
fn real_root(cubic: &Cubic) -> f64 {
    let bound = 1.0 + cubic.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let (mut lo, mut hi) = (-bound, bound);
    // p(lo) < 0 < p(hi) for a monic cubic
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = eval(cubic, mid);
        if p == 0.0 {
            return mid;
        }
        if p < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if eval(cubic, lo).abs() <= eval(cubic, hi).abs() {
        lo
    } else {
        hi
    }
}

/// Newton steps on the full cubic, kept only while the residual shrinks.
fn polish(cubic: &Cubic, mut z: Complex<f64>) -> Complex<f64> {
    let mut res = eval_complex(cubic, z).norm();
    for _ in 0..8 {
        let d = eval_derivative(cubic, z);
        if d.norm() == 0.0 || res == 0.0 {
            break;
        }
        let next = z - eval_complex(cubic, z) / d;
        let next_res = eval_complex(cubic, next).norm();
        if next_res < res {
            z = next;
            res = next_res;
        } else {
            break;
        }
    }
    z
}

/// The three roots of a monic cubic, sorted by real part then imaginary part.
///
/// One real root is bracketed and bisected, the remaining quadratic factor is
/// solved in closed form, and every root is polished with Newton's method.
/// Complex roots always come as an exact conjugate pair.
pub fn cubic_roots(cubic: &Cubic) -> [Complex<f64>; 3] {
    let [c2, c1, _] = *cubic;
    let r = polish(cubic, Complex::new(real_root(cubic), 0.0)).re;

    // λ³ + c2λ² + c1λ + c0 = (λ - r)(λ² + pλ + q)
    let p = c2 + r;
    let q = c1 + r * p;
    let disc = p * p - 4.0 * q;

    let mut roots = if disc >= 0.0 {
        let s = disc.sqrt();
        let big = -0.5 * (p + p.signum() * s);
        let (x1, x2) = if big == 0.0 { (0.0, -p) } else { (big, q / big) };
        [
            Complex::new(r, 0.0),
            Complex::new(polish(cubic, Complex::new(x1, 0.0)).re, 0.0),
            Complex::new(polish(cubic, Complex::new(x2, 0.0)).re, 0.0),
        ]
    } else {
        let z = polish(cubic, Complex::new(-0.5 * p, 0.5 * (-disc).sqrt()));
        let z = Complex::new(z.re, z.im.abs());
        [Complex::new(r, 0.0), z, z.conj()]
    };

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}
