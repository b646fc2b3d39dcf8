//! The regularized power `f_eps(x) = (x + eps)^q - eps^q`.
//!
//! On `[-eps/2, inf)` the closed form is used. Below `-eps/2` the function is continued by
//! `f(x) = f0 - G (1 - exp(-P(s0 - x)))` with a cubic `P` whose coefficients match value and
//! three derivatives at `s0 = -eps/2`. The continuation is increasing, strictly negative and
//! saturates at `f0 - G > -(eps/2)^q`, so `-|x|^q <= f_eps(x) < 0` holds on all of `x < 0`.

use libm::{exp, pow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedPower {
    eps: f64,
    q: f64,
    s0: f64,
    // value at s0 and saturation depth of the continuation
    f0: f64,
    depth: f64,
    // P(t) = a t + b t^2 + c t^3
    a: f64,
    b: f64,
    c: f64,
}

impl RegularizedPower {
    pub fn new(eps: f64, q: f64) -> Self {
        assert!(eps > 0.0 && q > 0.0 && q < 1.0, "eps > 0 and 0 < q < 1 required");
        let half = 0.5 * eps;
        let s0 = -half;
        let f0 = pow(half, q) - pow(eps, q);
        let f1 = q * pow(half, q - 1.0);
        let f2 = q * (q - 1.0) * pow(half, q - 2.0);
        let f3 = q * (q - 1.0) * (q - 2.0) * pow(half, q - 3.0);
        // f0 - depth must stay above -(eps/2)^q; use half of the admissible margin.
        let depth = 0.5 * pow(eps, q) * (pow(2.0, 1.0 - q) - 1.0);
        let a = f1 / depth;
        let b = 0.5 * (a * a - f2 / depth);
        let c = (f3 / depth + 6.0 * a * b - a * a * a) / 6.0;
        RegularizedPower { eps, q, s0, f0, depth, a, b, c }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `-eps/2`; below it the artificial continuation is used.
    pub fn switch_point(&self) -> f64 {
        self.s0
    }

    /// `L_eps = f_eps'(-eps/2) = q (eps/2)^(q-1)`, the Lipschitz constant of `f_eps` on
    /// `[-eps/2, inf)`.
    pub fn lipschitz(&self) -> f64 {
        self.q * pow(0.5 * self.eps, self.q - 1.0)
    }

    fn poly(&self, t: f64) -> (f64, f64, f64) {
        let p = t * (self.a + t * (self.b + t * self.c));
        let dp = self.a + t * (2.0 * self.b + 3.0 * t * self.c);
        let ddp = 2.0 * self.b + 6.0 * t * self.c;
        (p, dp, ddp)
    }

    pub fn value(&self, x: f64) -> f64 {
        if x >= self.s0 {
            pow(x + self.eps, self.q) - pow(self.eps, self.q)
        } else {
            let (p, _, _) = self.poly(self.s0 - x);
            self.f0 - self.depth * (1.0 - exp(-p))
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if x >= self.s0 {
            self.q * pow(x + self.eps, self.q - 1.0)
        } else {
            let (p, dp, _) = self.poly(self.s0 - x);
            self.depth * dp * exp(-p)
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        if x >= self.s0 {
            self.q * (self.q - 1.0) * pow(x + self.eps, self.q - 2.0)
        } else {
            let (p, dp, ddp) = self.poly(self.s0 - x);
            -self.depth * (ddp - dp * dp) * exp(-p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vanishes_at_zero() {
        for &(e, q) in &[(1.0, 0.5), (1e-3, 0.2), (0.3, 0.9)] {
            assert_eq!(RegularizedPower::new(e, q).value(0.0), 0.0);
        }
    }

    #[test]
    fn closed_form_values() {
        let f = RegularizedPower::new(1.0, 0.5);
        assert!((f.value(1.0) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((f.value(1.0) - 0.414214).abs() < 1e-6);

        let f = RegularizedPower::new(0.1, 0.5);
        let v = f.value(-0.05);
        assert!((v - (0.05f64.sqrt() - 0.1f64.sqrt())).abs() < 1e-15);
        assert!((v + 0.09262).abs() < 1e-5);
        assert!(v.abs() <= 0.05f64.sqrt());
    }

    #[test]
    fn converges_to_power_as_eps_vanishes() {
        let (x, q) = (0.7, 0.4);
        let target = pow(x, q);
        let mut prev_gap = f64::INFINITY;
        for k in 1..=6 {
            let eps = pow(10.0, -(k as f64));
            let gap = (target - RegularizedPower::new(eps, q).value(x)).abs();
            assert!(gap < prev_gap, "gap did not shrink at eps = {eps}");
            prev_gap = gap;
        }
        assert!(prev_gap < 0.01);
    }

    #[test]
    fn continuation_is_c3_at_switch_point() {
        let f = RegularizedPower::new(0.2, 0.6);
        let s0 = f.switch_point();
        let dx = 1e-9;
        assert!((f.value(s0 - dx) - f.value(s0)).abs() < 1e-7);
        assert!((f.derivative(s0 - dx) - f.derivative(s0)).abs() < 1e-6 * f.derivative(s0));
        let d2 = f.second_derivative(s0);
        assert!((f.second_derivative(s0 - dx) - d2).abs() < 1e-5 * d2.abs());
        // third derivative from one-sided differences of f'' on each side
        let h = 1e-6;
        let g = |x: f64| f.second_derivative(x);
        let right = (-3.0 * g(s0) + 4.0 * g(s0 + h) - g(s0 + 2.0 * h)) / (2.0 * h);
        let left = (3.0 * g(s0 - 1e-13) - 4.0 * g(s0 - h) + g(s0 - 2.0 * h)) / (2.0 * h);
        assert!((right - left).abs() < 1e-3 * right.abs(), "{left} vs {right}");
    }

    #[test]
    fn extension_bounds_far_left() {
        let f = RegularizedPower::new(0.05, 0.5);
        for k in 0..200 {
            let x = -0.025 - 0.01 * k as f64 * k as f64;
            let v = f.value(x);
            assert!(v < 0.0);
            assert!(v >= -pow(-x, 0.5));
            assert!(f.derivative(x) >= 0.0);
        }
    }

    #[test]
    fn lipschitz_constant() {
        let f = RegularizedPower::new(0.1, 0.5);
        assert!((f.lipschitz() - 0.5 * pow(0.05, -0.5)).abs() < 1e-14);
        for k in 0..100 {
            let x = -0.05 + 0.1 * k as f64;
            assert!(f.derivative(x) <= f.lipschitz() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        for &(e, q) in &[(0.1, 0.5), (0.01, 0.3), (1.0, 0.8)] {
            let f = RegularizedPower::new(e, q);
            let mut x = -e / 4.0;
            while x <= 10.0 {
                let h = 1e-6 * (x.abs() + e);
                let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                let d = f.derivative(x);
                assert!((fd - d).abs() <= 1e-6 * d.abs(), "x = {x}: {fd} vs {d}");
                let fd2 = (f.derivative(x + h) - f.derivative(x - h)) / (2.0 * h);
                let d2 = f.second_derivative(x);
                assert!((fd2 - d2).abs() <= 1e-5 * d2.abs());
                x += 0.0137 * (1.0 + x.abs());
            }
        }
    }

    proptest! {
        #[test]
        fn eps_monotone_on_positive_axis(x in 0.0f64..50.0, e1 in 1e-6f64..1.0, frac in 0.0f64..1.0, q in 0.05f64..0.95) {
            let e2 = e1 * frac.max(1e-3);
            prop_assert!(RegularizedPower::new(e2, q).value(x) >= RegularizedPower::new(e1, q).value(x) - 1e-15);
        }

        #[test]
        fn sign_property(x in -100.0f64..100.0, e in 1e-4f64..1.0, q in 0.05f64..0.95) {
            let v = RegularizedPower::new(e, q).value(x);
            if x == 0.0 { prop_assert_eq!(v, 0.0); } else { prop_assert!(x * v > 0.0); }
        }

        #[test]
        fn bounded_by_power(x in -100.0f64..100.0, e in 1e-4f64..1.0, q in 0.05f64..0.95) {
            let f = RegularizedPower::new(e, q);
            prop_assert!(f.value(x).abs() <= pow(x.abs(), q) * (1.0 + 1e-12));
        }

        #[test]
        fn holder_on_positive_axis(a in 0.0f64..20.0, b in 0.0f64..20.0, e in 1e-4f64..1.0, q in 0.05f64..0.95) {
            let f = RegularizedPower::new(e, q);
            prop_assert!((f.value(a) - f.value(b)).abs() <= pow((a - b).abs(), q) + 1e-12);
        }

        #[test]
        fn increasing_everywhere(x in -50.0f64..50.0, dx in 1e-6f64..1.0, e in 1e-3f64..1.0, q in 0.05f64..0.95) {
            let f = RegularizedPower::new(e, q);
            prop_assert!(f.value(x + dx) >= f.value(x));
        }
    }
}
