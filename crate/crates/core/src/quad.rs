//! Quadrature: composite Gauss–Legendre, adaptive Simpson and the singular integral `I(a,b)`.

use alloc::format;

use crate::error::{Error, Result};

const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Nodes and weights of the 4-point rule mapped to `[a, b]`. Exact for degree 7.
pub fn gauss4(a: f64, b: f64) -> [(f64, f64); 4] {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out = [(0.0, 0.0); 4];
    for k in 0..4 {
        out[k] = (mid + half * GL4_NODES[k], half * GL4_WEIGHTS[k]);
    }
    out
}

/// Composite 4-point Gauss–Legendre with `panels` equal panels.
pub fn integrate_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            gauss4(lo, lo + h).iter().map(|&(x, w)| w * f(x)).sum::<f64>()
        })
        .sum()
}

/// Adaptive Simpson with Richardson correction.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `I(a,b) = ∫_0^1 ds / ((1-s)^a s^b)`, finite iff `a < 1` and `b < 1`.
///
/// Each half of the interval is mapped by `s = v^(1/(1-b))` (resp. the mirror image) which
/// removes the endpoint singularity before adaptive Simpson is applied.
pub fn singular_beta_integral(a: f64, b: f64) -> Result<f64> {
    if !((0.0..1.0).contains(&a) && (0.0..1.0).contains(&b)) {
        return Err(Error::InvalidInput(format!(
            "I(a,b) needs 0 <= a < 1 and 0 <= b < 1, got a = {a}, b = {b}"
        )));
    }
    let half = |near: f64, far: f64| {
        let e = 1.0 / (1.0 - near);
        let upper = libm::pow(0.5, 1.0 - near);
        let g = move |v: f64| libm::pow(1.0 - libm::pow(v, e), -far);
        e * adaptive_simpson(&g, 0.0, upper, 1e-14)
    };
    Ok(half(b, a) + half(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_for_degree_seven() {
        let v = integrate_gauss(|x| libm::pow(x, 7.0) - 3.0 * x * x, 0.0, 2.0, 1);
        assert!((v - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn beta_half_half_is_pi() {
        let v = singular_beta_integral(0.5, 0.5).unwrap();
        assert!((v - core::f64::consts::PI).abs() < 1e-8, "{v}");
    }

    #[test]
    fn beta_matches_gamma_identity() {
        // I(a,b) = B(1-b, 1-a) = Γ(1-a)Γ(1-b)/Γ(2-a-b)
        for &(a, b) in &[(0.5, 0.25), (0.1, 0.9), (0.0, 0.0), (0.75, 0.3), (0.5, 1.0 / 3.0)] {
            let exact = libm::tgamma(1.0 - a) * libm::tgamma(1.0 - b) / libm::tgamma(2.0 - a - b);
            let v = singular_beta_integral(a, b).unwrap();
            assert!((v - exact).abs() < 1e-9 * exact, "a={a} b={b}: {v} vs {exact}");
        }
        assert!((singular_beta_integral(0.5, 0.25).unwrap() - 2.39628).abs() < 1e-5);
    }

    #[test]
    fn beta_rejects_divergent_exponents() {
        assert!(singular_beta_integral(1.0, 0.2).is_err());
        assert!(singular_beta_integral(0.2, 1.5).is_err());
        assert!(singular_beta_integral(-0.1, 0.2).is_err());
    }
}
