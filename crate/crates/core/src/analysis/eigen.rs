use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of a 2x2 or 3x3 matrix from the closed-form roots of its
/// characteristic polynomial, sorted by real part (then imaginary part)
/// descending.
pub fn eigenvalues_small(m: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = m.len();
    if !(n == 2 || n == 3) || m.iter().any(|row| row.len() != n) {
        return Err(Error::domain(format!(
            "eigenvalues_small supports square 2x2 and 3x3 matrices, got {n} rows"
        )));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix entries must be finite"));
    }
    let mut roots = if n == 2 {
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        quadratic_roots(-tr, det).to_vec()
    } else {
        let tr = m[0][0] + m[1][1] + m[2][2];
        let minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        cubic_roots(-tr, minors, -det).to_vec()
    };
    roots.sort_by(|a, b| match b.re.total_cmp(&a.re) {
        Ordering::Equal => b.im.total_cmp(&a.im),
        o => o,
    });
    Ok(roots)
}

/// Roots of `z^2 + b z + c`.
fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            // b == 0 and c == 0
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
    }
}

fn cubic_eval(a: f64, b: f64, c: f64, z: f64) -> (f64, f64) {
    let value = ((z + a) * z + b) * z + c;
    let slope = (3.0 * z + 2.0 * a) * z + b;
    (value, slope)
}

fn polish(a: f64, b: f64, c: f64, mut z: f64) -> f64 {
    for _ in 0..3 {
        let (v, d) = cubic_eval(a, b, c, z);
        if v == 0.0 || d == 0.0 {
            break;
        }
        let next = z - v / d;
        if cubic_eval(a, b, c, next).0.abs() < v.abs() {
            z = next;
        } else {
            break;
        }
    }
    z
}

/// Roots of `z^3 + a z^2 + b z + c` by Cardano's formula, using the
/// trigonometric form when all roots are real.
fn cubic_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let scale = (half_q * half_q).max(third_p.abs().powi(3));

    if disc > 1e-12 * scale {
        let sq = disc.sqrt();
        let u = (-half_q + sq).cbrt();
        let v = (-half_q - sq).cbrt();
        let real = polish(a, b, c, u + v - shift);
        // Deflate: z^3 + a z^2 + b z + c = (z - real)(z^2 + (a + real) z + e)
        let b2 = a + real;
        let c2 = b + real * b2;
        let [r1, r2] = quadratic_roots(b2, c2);
        [Complex64::new(real, 0.0), r1, r2]
    } else if p.abs() <= 1e-14 * (1.0 + a * a) {
        let z = -shift;
        [Complex64::new(z, 0.0); 3]
    } else {
        let r = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let y = r * (phi - 2.0 * PI * k as f64 / 3.0).cos();
            *slot = Complex64::new(polish(a, b, c, y - shift), 0.0);
        }
        out
    }
}
