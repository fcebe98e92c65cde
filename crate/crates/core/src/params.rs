use crate::{Error, Result};

/// Scalar data of the problem `-Δu + a(x)u = u^(p-1) + ε u^(2*-1)`.
///
/// The limit potential is normalized to `a_∞ = 1`; use
/// [`ProblemParams::from_unnormalized`] to reduce a problem with
/// `a_∞ ≠ 1` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    /// Space dimension, `N ≥ 3`.
    pub n: u32,
    /// Subcritical exponent, `2 < p < 2N/(N-2)`.
    pub p: f64,
    /// Coefficient of the critical term, `ε ≥ 0`.
    pub eps: f64,
    /// Limit value of the potential at infinity (always 1 after reduction).
    pub a_infty: f64,
}

/// Change of variables taking a problem with `a_∞ ≠ 1` to the normalized one.
///
/// If `u` solves the original problem then
/// `u(x) = amplitude · v(x / length)` where `v` solves the normalized
/// problem with coefficient `eps_normalized`.
#[derive(Debug, Clone, Copy)]
pub struct Rescaling {
    pub amplitude: f64,
    pub length: f64,
    pub eps_normalized: f64,
}

impl ProblemParams {
    pub fn new(n: u32, p: f64, eps: f64) -> Result<Self> {
        let params = ProblemParams { n, p, eps, a_infty: 1.0 };
        params.validate()?;
        Ok(params)
    }

    /// Reduce a problem with limit potential `a_infty` to the normalized
    /// one, returning the normalized parameters and the change of variables.
    ///
    /// With `u(x) = λ v(μ x)`, `μ² = a_∞` and `λ^(p-2) = a_∞`, the function
    /// `v` solves the normalized equation with
    /// `ε' = ε a_∞^((2*-2)/(p-2) - 1)`.
    pub fn from_unnormalized(n: u32, p: f64, eps: f64, a_infty: f64) -> Result<(Self, Rescaling)> {
        if !(a_infty > 0.0) {
            return Err(Error::InvalidParams(format!("a_infty = {a_infty} must be positive")));
        }
        let crit = 2.0 * n as f64 / (n as f64 - 2.0);
        let lambda = a_infty.powf(1.0 / (p - 2.0));
        let mu = a_infty.sqrt();
        let eps_normalized = eps * a_infty.powf((crit - 2.0) / (p - 2.0) - 1.0);
        let params = ProblemParams::new(n, p, eps_normalized)?;
        Ok((
            params,
            Rescaling { amplitude: lambda, length: 1.0 / mu, eps_normalized },
        ))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidParams(format!("N = {} but N >= 3 is required", self.n)));
        }
        let crit = self.crit_exp();
        if !(self.p > 2.0 && self.p < crit) {
            return Err(Error::InvalidParams(format!(
                "p = {} outside the subcritical range (2, {crit})",
                self.p
            )));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParams(format!("eps = {} must be >= 0", self.eps)));
        }
        if !(self.a_infty > 0.0) {
            return Err(Error::InvalidParams("a_infty must be positive".into()));
        }
        Ok(())
    }

    /// Critical Sobolev exponent `2* = 2N/(N-2)`.
    pub fn crit_exp(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_params() {
        let p = ProblemParams::new(3, 4.0, 0.05).unwrap();
        assert_eq!(p.crit_exp(), 6.0);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(ProblemParams::new(3, 6.5, 0.0).is_err());
        assert!(ProblemParams::new(3, 2.0, 0.0).is_err());
        assert!(ProblemParams::new(2, 3.0, 0.0).is_err());
    }

    #[test]
    fn rescaling_identity_at_unit_a() {
        let (p, r) = ProblemParams::from_unnormalized(3, 4.0, 0.1, 1.0).unwrap();
        assert_eq!(p.eps, 0.1);
        assert_eq!(r.amplitude, 1.0);
        assert_eq!(r.length, 1.0);
    }

    #[test]
    fn rescaling_scales_eps() {
        let (p, _) = ProblemParams::from_unnormalized(3, 4.0, 0.1, 4.0).unwrap();
        // ε' = ε a^((2*-2)/(p-2) - 1) = 0.1 * 4 = 0.4 for N=3, p=4.
        assert!((p.eps - 0.4).abs() < 1e-14);
    }
}
