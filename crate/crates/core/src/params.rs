//! Problem parameters `(N, q, m, eps)`.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularize::RegularizedPower;

/// The exponent `q` of the gradient nonlinearity.
///
/// Kept as a rational when it is built from integers so that the critical relation
/// `q = 2/N` can be tested exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Rational { num: u32, den: u32 },
    Real(f64),
}

impl Exponent {
    pub fn rational(num: u32, den: u32) -> Self {
        Exponent::Rational { num, den }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Rational { num, den } => num as f64 / den as f64,
            Exponent::Real(q) => q,
        }
    }

    /// `q == 2/N`, exact for rationals.
    pub fn is_critical_for(&self, dim: u32) -> bool {
        match *self {
            Exponent::Rational { num, den } => num as u64 * dim as u64 == 2 * den as u64,
            Exponent::Real(q) => q == 2.0 / dim as f64,
        }
    }
}

/// Regularization level: a positive `eps` or the limit problem `eps = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Epsilon {
    Positive(f64),
    Limit,
}

impl Epsilon {
    pub fn value(&self) -> f64 {
        match *self {
            Epsilon::Positive(e) => e,
            Epsilon::Limit => 0.0,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, Epsilon::Limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Space dimension `N >= 2` of the original chemotaxis problem.
    pub dim: u32,
    pub q: Exponent,
    /// Boundary mass `m = u(t,1)`.
    pub mass: f64,
    pub epsilon: Epsilon,
}

impl ProblemParams {
    pub fn new(dim: u32, q: Exponent, mass: f64, epsilon: Epsilon) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!("N = {dim} must be >= 2")));
        }
        if let Exponent::Rational { den: 0, .. } = q {
            return Err(Error::InvalidParams("q has a zero denominator".into()));
        }
        let qv = q.value();
        if !(qv > 0.0 && qv < 1.0) {
            return Err(Error::InvalidParams(format!("q = {qv} must lie in (0, 1)")));
        }
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParams(format!("m = {mass} must be finite and >= 0")));
        }
        if let Epsilon::Positive(e) = epsilon {
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::InvalidParams(format!("eps = {e} must be finite and > 0")));
            }
        }
        Ok(ProblemParams { dim, q, mass, epsilon })
    }

    /// The critical case `q = 2/N`, stored exactly.
    pub fn critical(dim: u32, mass: f64, epsilon: Epsilon) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParams(format!(
                "critical exponent 2/N lies in (0,1) only for N >= 3, got N = {dim}"
            )));
        }
        Self::new(dim, Exponent::rational(2, dim), mass, epsilon)
    }

    pub fn q(&self) -> f64 {
        self.q.value()
    }

    /// Dimension `d = N + 2` of the ball carrying the transformed problem.
    pub fn ball_dim(&self) -> u32 {
        self.dim + 2
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::new(self.dim, self.q, mass, self.epsilon)
    }

    pub fn with_epsilon(&self, epsilon: Epsilon) -> Result<Self> {
        Self::new(self.dim, self.q, self.mass, epsilon)
    }

    /// The reaction nonlinearity selected by `epsilon`.
    pub fn reaction(&self) -> Reaction {
        match self.epsilon {
            Epsilon::Positive(e) => Reaction::Regularized(RegularizedPower::new(e, self.q())),
            Epsilon::Limit => Reaction::Power { q: self.q() },
        }
    }
}

/// `s -> f(s)` in `u_t = ... + u f(u_x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reaction {
    Regularized(RegularizedPower),
    /// `s^q` with the argument clamped at zero.
    Power { q: f64 },
}

/// One evaluation of the reaction, with flags for the events solvers count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionValue {
    pub value: f64,
    /// The argument was negative and clamped to zero (limit problem).
    pub clamped: bool,
    /// `f_eps` was evaluated below `-eps/2`, on its artificial extension.
    pub extended: bool,
}

impl Reaction {
    pub fn eval(&self, s: f64) -> ReactionValue {
        match self {
            Reaction::Regularized(f) => ReactionValue {
                value: f.value(s),
                clamped: false,
                extended: s < f.switch_point(),
            },
            Reaction::Power { q } => {
                let clamped = s < 0.0;
                let value = if s > 0.0 { libm::pow(s, *q) } else { 0.0 };
                ReactionValue { value, clamped, extended: false }
            }
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s).value
    }

    /// Slope bound used to size explicit steps. For the limit power the derivative is evaluated
    /// at `max(s_min, floor)`.
    pub fn slope_bound(&self, s_min: f64, floor: f64) -> f64 {
        match self {
            Reaction::Regularized(f) => f.lipschitz(),
            Reaction::Power { q } => q * libm::pow(s_min.max(floor), q - 1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ProblemParams::new(1, Exponent::Real(0.5), 1.0, Epsilon::Limit).is_err());
        assert!(ProblemParams::new(2, Exponent::Real(1.0), 1.0, Epsilon::Limit).is_err());
        assert!(ProblemParams::new(2, Exponent::rational(1, 1), 1.0, Epsilon::Limit).is_err());
        assert!(ProblemParams::new(2, Exponent::Real(0.0), 1.0, Epsilon::Limit).is_err());
        assert!(ProblemParams::new(2, Exponent::Real(0.5), -1.0, Epsilon::Limit).is_err());
        assert!(ProblemParams::new(2, Exponent::Real(0.5), 1.0, Epsilon::Positive(0.0)).is_err());
        assert!(ProblemParams::new(2, Exponent::Real(0.5), f64::NAN, Epsilon::Limit).is_err());
        assert!(ProblemParams::new(2, Exponent::Real(0.5), 0.0, Epsilon::Positive(1e-3)).is_ok());
    }

    #[test]
    fn critical_exponent_is_exact() {
        let p = ProblemParams::critical(3, 1.0, Epsilon::Limit).unwrap();
        assert!(p.q.is_critical_for(3));
        assert!(!p.q.is_critical_for(4));
        assert!(Exponent::rational(4, 6).is_critical_for(3));
        // N = 2 would need q = 1, which is excluded.
        assert!(ProblemParams::critical(2, 1.0, Epsilon::Limit).is_err());
    }

    #[test]
    fn limit_reaction_clamps() {
        let r = Reaction::Power { q: 0.5 };
        let v = r.eval(-0.3);
        assert_eq!(v.value, 0.0);
        assert!(v.clamped);
        assert_eq!(r.value(4.0), 2.0);
    }
}
