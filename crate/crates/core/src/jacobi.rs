//! Jacobi polynomials `P_n^{(a,b)}(x)` for general real parameters.

/// Relative size below which a recurrence denominator counts as vanishing.
const DEGENERATE: f64 = 1e-3;

/// `P_n^{(a,b)}(x)` by the forward three-term recurrence, falling back to
/// [`jacobi_explicit`] when a recurrence denominator vanishes.
pub fn jacobi(n: u32, a: f64, b: f64, x: f64) -> f64 {
    match recurrence(n, a, b, x, 1.0) {
        Some(v) => v,
        None => jacobi_explicit(n, a, b, x),
    }
}

/// `P_n^{(a,b)}(x) / x^n` for |x| > 1, evaluated without forming `x^n`.
///
/// Used where `x` is so large that `x^n` overflows.
pub fn jacobi_scaled(n: u32, a: f64, b: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        return jacobi(n, a, b, x) / x.powi(n as i32);
    }
    match recurrence(n, a, b, x, 1.0 / x) {
        Some(v) => v,
        None => {
            // The explicit sum in scaled form: ((x∓1)/2)^j/x^j stays bounded.
            let mut sum = 0.0;
            let lo = 0.5 * (1.0 - 1.0 / x);
            let hi = 0.5 * (1.0 + 1.0 / x);
            for s in 0..=n {
                sum += binomial(n as f64 + a, n - s)
                    * binomial(n as f64 + b, s)
                    * lo.powi(s as i32)
                    * hi.powi((n - s) as i32);
            }
            sum
        }
    }
}

/// Recurrence for `P_j(x)·scale^j`. Returns `None` on a degenerate step.
fn recurrence(n: u32, a: f64, b: f64, x: f64, scale: f64) -> Option<f64> {
    let p0 = 1.0;
    if n == 0 {
        return Some(p0);
    }
    let p1 = (0.5 * (a - b) + 0.5 * (a + b + 2.0) * x) * scale;
    let mut prev = p0;
    let mut cur = p1;
    for j in 2..=n {
        let jf = j as f64;
        let s = 2.0 * jf + a + b;
        let denom = 2.0 * jf * (jf + a + b) * (s - 2.0);
        let size = 2.0 * jf * (jf + a.abs() + b.abs()) * (s.abs() + 2.0);
        if denom.abs() <= DEGENERATE * size {
            return None;
        }
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (jf + a - 1.0) * (jf + b - 1.0) * s;
        let next = (c1 * cur * scale - c2 * prev * scale * scale) / denom;
        prev = cur;
        cur = next;
    }
    Some(cur)
}

/// Explicit finite sum
/// `Σ_s C(n+a, n−s) C(n+b, s) ((x−1)/2)^s ((x+1)/2)^{n−s}`
/// with generalized binomial coefficients.
pub fn jacobi_explicit(n: u32, a: f64, b: f64, x: f64) -> f64 {
    let lo = 0.5 * (x - 1.0);
    let hi = 0.5 * (x + 1.0);
    (0..=n)
        .map(|s| {
            binomial(n as f64 + a, n - s)
                * binomial(n as f64 + b, s)
                * lo.powi(s as i32)
                * hi.powi((n - s) as i32)
        })
        .sum()
}

/// Generalized binomial coefficient `z(z−1)…(z−j+1)/j!`.
fn binomial(z: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (z - i as f64) / (i + 1) as f64)
}

/// First and second x-derivatives of `P_n^{(a,b)}(x)`.
pub fn jacobi_derivatives(n: u32, a: f64, b: f64, x: f64) -> (f64, f64) {
    let nf = n as f64;
    let d1 = if n >= 1 {
        0.5 * (nf + a + b + 1.0) * jacobi(n - 1, a + 1.0, b + 1.0, x)
    } else {
        0.0
    };
    let d2 = if n >= 2 {
        0.25 * (nf + a + b + 1.0) * (nf + a + b + 2.0) * jacobi(n - 2, a + 2.0, b + 2.0, x)
    } else {
        0.0
    };
    (d1, d2)
}
