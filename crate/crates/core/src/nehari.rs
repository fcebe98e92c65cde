//! The four functionals and Nehari-manifold projections: closed form at
//! ε = 0, bracketed Newton for the scalar root at ε > 0.

use crate::params::ProblemParams;
use crate::{Error, Result};

/// The quadrature ingredients a projection needs; norms are never
/// re-integrated once bundled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBundle {
    /// `‖u‖_a² = ∫(|∇u|² + a(x)u²)` (or `‖u‖²` for the limit functionals).
    pub norm_a_sq: f64,
    /// `|u|_p^p`
    pub lp_p: f64,
    /// `|u|_{2*}^{2*}`
    pub lcrit: f64,
    /// `|u|_2²`
    pub l2: f64,
}

/// The scalar `t > 0` placing `t·u` on the Nehari manifold.
#[derive(Debug, Clone, Copy)]
pub struct NehariProjection {
    pub t: f64,
    pub energy_at_t: f64,
    pub source: NormBundle,
    pub eps: f64,
}

/// `E_ε(u) = 1/2 ‖u‖² - 1/p |u|_p^p - ε/2* |u|_{2*}^{2*}`.
pub fn energy(bundle: &NormBundle, params: &ProblemParams) -> f64 {
    0.5 * bundle.norm_a_sq
        - bundle.lp_p / params.p
        - params.eps * bundle.lcrit / params.crit_exp()
}

/// Energy of the scaled function `t·u` from the same bundle.
pub fn energy_at(bundle: &NormBundle, params: &ProblemParams, t: f64) -> f64 {
    let crit = params.crit_exp();
    0.5 * t * t * bundle.norm_a_sq
        - t.powf(params.p) * bundle.lp_p / params.p
        - params.eps * t.powf(crit) * bundle.lcrit / crit
}

/// Scale the bundle entries as the function `λ·u` would scale them.
pub fn scaled_bundle(bundle: &NormBundle, params: &ProblemParams, lambda: f64) -> NormBundle {
    NormBundle {
        norm_a_sq: lambda * lambda * bundle.norm_a_sq,
        lp_p: lambda.powf(params.p) * bundle.lp_p,
        lcrit: lambda.powf(params.crit_exp()) * bundle.lcrit,
        l2: lambda * lambda * bundle.l2,
    }
}

// residual of the defining equation ‖u‖² = t^(p-2)|u|_p^p + ε t^(2*-2)|u|_{2*}^{2*}
/// `‖u‖² - t^{p-2}|u|_p^p - ε t^{2*-2}|u|_{2*}^{2*}`, zero on the Nehari set.
pub fn residual(bundle: &NormBundle, params: &ProblemParams, t: f64) -> f64 {
    bundle.norm_a_sq
        - t.powf(params.p - 2.0) * bundle.lp_p
        - params.eps * t.powf(params.crit_exp() - 2.0) * bundle.lcrit
}

/// Unique `t > 0` with `t·u` on the Nehari manifold.
///
/// At ε = 0 this is the closed form `(‖u‖²/|u|_p^p)^(1/(p-2))`; at ε > 0
/// the unique positive root is found by Newton safeguarded with bisection
/// inside a bracket anchored at the ε = 0 value.
pub fn project_to_nehari(bundle: &NormBundle, params: &ProblemParams) -> Result<NehariProjection> {
    if bundle.lp_p <= 0.0 && bundle.lcrit <= 0.0 {
        return Err(Error::DegenerateFunction);
    }
    let t = if params.eps == 0.0 || bundle.lcrit == 0.0 {
        (bundle.norm_a_sq / bundle.lp_p).powf(1.0 / (params.p - 2.0))
    } else {
        let t0 = if bundle.lp_p > 0.0 {
            (bundle.norm_a_sq / bundle.lp_p).powf(1.0 / (params.p - 2.0))
        } else {
            (bundle.norm_a_sq / (params.eps * bundle.lcrit))
                .powf(1.0 / (params.crit_exp() - 2.0))
        };
        // the ε-term only shrinks t, so t0 is an upper anchor
        let mut lo = t0 / 8.0;
        let mut hi = t0 * 8.0;
        while residual(bundle, params, lo) < 0.0 {
            lo /= 4.0;
            if lo < 1e-300 {
                return Err(Error::DegenerateFunction);
            }
        }
        while residual(bundle, params, hi) > 0.0 {
            hi *= 4.0;
            if hi > 1e300 {
                return Err(Error::DegenerateFunction);
            }
        }
        let mut t = t0.clamp(lo, hi);
        for _ in 0..200 {
            let f = residual(bundle, params, t);
            if f > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let df = -(params.p - 2.0) * t.powf(params.p - 3.0) * bundle.lp_p
                - params.eps
                    * (params.crit_exp() - 2.0)
                    * t.powf(params.crit_exp() - 3.0)
                    * bundle.lcrit;
            let mut next = t - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 * t {
                t = next;
                break;
            }
            t = next;
            if residual(bundle, params, t).abs() < 1e-12 * bundle.norm_a_sq {
                break;
            }
        }
        t
    };
    Ok(NehariProjection {
        t,
        energy_at_t: energy_at(bundle, params, t),
        source: *bundle,
        eps: params.eps,
    })
}

/// True iff the energy along the ray `t ↦ E(t·u)` is maximal at `t_star`
/// among 64 log-spaced samples of `[t_star/10, 10 t_star]`.
pub fn verify_max_along_ray(bundle: &NormBundle, params: &ProblemParams, t_star: f64) -> bool {
    let e_star = energy_at(bundle, params, t_star);
    let lo = (t_star / 10.0).ln();
    let hi = (t_star * 10.0).ln();
    for i in 0..64 {
        let t = (lo + (hi - lo) * i as f64 / 63.0).exp();
        if energy_at(bundle, params, t) > e_star {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eps: f64) -> ProblemParams {
        ProblemParams::new(3, 4.0, eps).unwrap()
    }

    fn bundle() -> NormBundle {
        NormBundle { norm_a_sq: 18.0, lp_p: 11.0, lcrit: 40.0, l2: 19.0 }
    }

    #[test]
    fn closed_form_at_eps_zero() {
        let b = bundle();
        let pr = project_to_nehari(&b, &params(0.0)).unwrap();
        assert!((pr.t - (18.0f64 / 11.0).sqrt()).abs() < 1e-14);
        assert!(residual(&b, &params(0.0), pr.t).abs() < 1e-12);
    }

    #[test]
    fn eps_root_satisfies_residual() {
        let b = bundle();
        let p = params(0.05);
        let pr = project_to_nehari(&b, &p).unwrap();
        assert!(residual(&b, &p, pr.t).abs() < 1e-10 * b.norm_a_sq);
        // the critical term shrinks t
        let pr0 = project_to_nehari(&b, &params(0.0)).unwrap();
        assert!(pr.t < pr0.t);
    }

    #[test]
    fn scaling_law() {
        // t(λu)·λ = t(u)
        let p = params(0.05);
        let b = bundle();
        let pr = project_to_nehari(&b, &p).unwrap();
        for lambda in [0.3, 2.0, 7.5] {
            let bs = scaled_bundle(&b, &p, lambda);
            let prs = project_to_nehari(&bs, &p).unwrap();
            assert!((prs.t * lambda - pr.t).abs() < 1e-9 * pr.t, "λ = {lambda}");
        }
    }

    #[test]
    fn monotone_in_eps() {
        let b = bundle();
        let mut last = f64::INFINITY;
        for eps in [0.0, 0.02, 0.05, 0.1, 0.2] {
            let t = project_to_nehari(&b, &params(eps)).unwrap().t;
            assert!(t <= last);
            last = t;
        }
    }

    #[test]
    fn max_along_ray() {
        let b = bundle();
        let p = params(0.05);
        let pr = project_to_nehari(&b, &p).unwrap();
        assert!(verify_max_along_ray(&b, &p, pr.t));
        assert!(!verify_max_along_ray(&b, &p, pr.t * 1.1));
    }

    #[test]
    fn on_nehari_energy_formula() {
        // E = (1/2 - 1/p)‖u‖² + ε(1/p - 1/2*)|u|_{2*}^{2*} on the manifold
        let b = bundle();
        let p = params(0.05);
        let pr = project_to_nehari(&b, &p).unwrap();
        let bs = scaled_bundle(&b, &p, pr.t);
        let direct = energy(&bs, &p);
        let formula = (0.5 - 1.0 / p.p) * bs.norm_a_sq
            + p.eps * (1.0 / p.p - 1.0 / p.crit_exp()) * bs.lcrit;
        assert!((direct - formula).abs() < 1e-10 * direct.abs());
    }

    #[test]
    fn degenerate_rejected() {
        let b = NormBundle { norm_a_sq: 1.0, lp_p: 0.0, lcrit: 0.0, l2: 1.0 };
        assert!(matches!(project_to_nehari(&b, &params(0.1)), Err(Error::DegenerateFunction)));
    }
}
