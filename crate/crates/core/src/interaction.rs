//! Exponential interaction asymptotics between translated bumps: the scale
//! `δ_ρ`, the translated-kernel limit and the constant `c₁`, the elementary
//! power inequality, `γ(s)`, and the two-bump energy expansion checks.

use crate::error::Error;
use crate::fields::{cross_h1, cross_term, BumpField, BumpTerm, DomainSpec};
use crate::quad::{adaptive_1d, cylindrical_integral, Frame};
use crate::radial::RadialProfile;
use crate::Result;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// `δ_ρ = (ρ^((N-1)/2) e^(2ρ))^(-1)`, the scale of the coupling between
/// bumps at mutual distance `2ρ`.
pub fn delta_rho(rho: f64, n: u32) -> f64 {
    1.0 / (rho.powf((n as f64 - 1.0) / 2.0) * (2.0 * rho).exp())
}

/// Plateau record of the normalized cross integrals.
#[derive(Debug, Clone)]
pub struct InteractionReport {
    pub rho_list: Vec<f64>,
    pub raw_integrals: Vec<f64>,
    pub normalized: Vec<f64>,
    pub c1_estimate: f64,
    /// Relative variation of `normalized` over the last three ρ.
    pub plateau_drift: f64,
    pub gamma_half: f64,
}

impl InteractionReport {
    /// CSV with columns `rho,raw,delta_rho,normalized,target,gap`.
    pub fn write_csv(&self, path: &Path, target: f64) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "rho,raw,delta_rho,normalized,target,gap")?;
        for (i, &rho) in self.rho_list.iter().enumerate() {
            let norm = self.normalized[i];
            writeln!(
                f,
                "{rho},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.raw_integrals[i],
                self.raw_integrals[i] / norm,
                norm,
                target,
                (norm - target) / target
            )?;
        }
        Ok(())
    }
}

/// `∫ w^{e1}(x - ρe₁) w^{e2}(x + ρe₁) dx`, the cross integral of two bumps
/// at distance 2ρ.
pub fn raw_cross_integral(
    profile: &RadialProfile,
    exp1: f64,
    exp2: f64,
    rho: f64,
) -> Result<f64> {
    cross_term(profile, exp1, exp2, [rho, 0.0, 0.0], [-rho, 0.0, 0.0])
}

/// Normalized cross integrals `δ_ρ^{-1} ∫ w^{p-1}(x-ρe₁) w(x+ρe₁) dx` over
/// `rho_list`; the plateau value at the largest ρ estimates `c₁`.
pub fn estimate_c1(profile: &RadialProfile, rho_list: &[f64]) -> Result<InteractionReport> {
    if rho_list.len() < 3 || rho_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "rho_list must be increasing with at least 3 entries".into(),
        ));
    }
    let params = profile.params;
    let mut raw = Vec::with_capacity(rho_list.len());
    let mut normalized = Vec::with_capacity(rho_list.len());
    for &rho in rho_list {
        let v = raw_cross_integral(profile, params.p - 1.0, 1.0, rho)?;
        raw.push(v);
        normalized.push(v / delta_rho(rho, params.n));
    }
    let tail = &normalized[normalized.len() - 3..];
    let last = tail[2];
    let drift = tail
        .iter()
        .map(|v| ((v - last) / last).abs())
        .fold(0.0, f64::max);
    if drift > 0.05 {
        return Err(Error::PlateauNotReached(drift));
    }
    let lp = profile.norm_bundle()?.lp_p.powf(1.0 / params.p);
    Ok(InteractionReport {
        rho_list: rho_list.to_vec(),
        raw_integrals: raw,
        c1_estimate: last,
        plateau_drift: drift,
        gamma_half: gamma_function(0.5, last, lp, params.p),
        normalized,
    })
}

/// `∫ h(|x|) e^{-α x·ẑ} dx` for radial `h`, reduced to one dimension:
/// the angular factor integrates to `(e^{αr} - e^{-αr})/(αr)` times `2π`.
pub fn tilted_radial_integral(
    h: impl Fn(f64) -> f64,
    alpha: f64,
    r_max: f64,
) -> Result<f64> {
    let v = adaptive_1d(
        |r| {
            if r < 1e-14 {
                return 0.0;
            }
            h(r) * r / alpha * ((alpha * r).exp() - (-alpha * r).exp())
        },
        0.0,
        r_max,
        1e-10,
    )?;
    Ok(2.0 * std::f64::consts::PI * v)
}

/// Independent target for the `c₁` plateau: the translated-kernel limit
/// evaluated in closed reduced form,
/// `c · 2^{-(N-1)/2} ∫ w^{p-1}(x) e^{-x₁} dx`.
pub fn c1_oracle(profile: &RadialProfile) -> Result<f64> {
    let params = profile.params;
    let c = profile
        .decay_c()
        .ok_or_else(|| Error::NoPlateau("profile has no exponential tail".into()))?;
    let h = |r: f64| profile.eval(r).powf(params.p - 1.0);
    let integral = tilted_radial_integral(h, 1.0, profile.r_max)?;
    Ok(c * 2.0f64.powf(-(params.n as f64 - 1.0) / 2.0) * integral)
}

/// The translated factor `g` of the kernel limit, specified by its decay
/// law `g(x) ≈ γ e^{-α|x|} |x|^{-b}`.
pub enum DecayG {
    /// A shot profile; `(α, b, γ) = (1, (N-1)/2, decay_c)`.
    Profile(Arc<RadialProfile>),
    /// `g = e^{-|x|}` exactly; `(α, b, γ) = (1, 0, 1)`.
    PureExp,
}

impl DecayG {
    fn decay_triple(&self) -> Result<(f64, f64, f64)> {
        match self {
            DecayG::Profile(p) => {
                let c = p
                    .decay_c()
                    .ok_or_else(|| Error::NoPlateau("profile has no exponential tail".into()))?;
                Ok((1.0, (p.params.n as f64 - 1.0) / 2.0, c))
            }
            DecayG::PureExp => Ok((1.0, 0.0, 1.0)),
        }
    }

    fn value(&self, r: f64) -> f64 {
        match self {
            DecayG::Profile(p) => p.eval(r),
            DecayG::PureExp => (-r).exp(),
        }
    }

    fn extent(&self) -> f64 {
        match self {
            DecayG::Profile(p) => p.r_max,
            DecayG::PureExp => 40.0,
        }
    }
}

/// The fixed factor `h` of the kernel limit.
pub enum IntegrandH {
    /// `w^q` for a shot profile.
    ProfilePower(Arc<RadialProfile>, f64),
    /// `(1 - (r/R)²)³` on `r < R`, a compactly supported mollified bump.
    MollifiedBump { radius: f64 },
}

impl IntegrandH {
    fn value(&self, r: f64) -> f64 {
        match self {
            IntegrandH::ProfilePower(p, q) => p.eval(r).powf(*q),
            IntegrandH::MollifiedBump { radius } => {
                if r < *radius {
                    (1.0 - (r / radius).powi(2)).powi(3)
                } else {
                    0.0
                }
            }
        }
    }

    fn extent(&self) -> f64 {
        match self {
            IntegrandH::ProfilePower(p, _) => p.r_max,
            IntegrandH::MollifiedBump { radius } => *radius,
        }
    }
}

/// Sequence of rescaled two-center integrals against the limit target.
#[derive(Debug, Clone)]
pub struct BlReport {
    pub rho_list: Vec<f64>,
    /// `(∫ g(x + ρz) h(x) dx) e^{α|ρz|} |ρz|^b` per ρ.
    pub lhs: Vec<f64>,
    /// `γ ∫ h(x) e^{-α x·z/|z|} dx`.
    pub rhs: f64,
    pub rel_gap: f64,
}

/// Verifies the translated-kernel limit
/// `(∫ g(x+ρz) h(x) dx) e^{α|ρz|} |ρz|^b → γ ∫ h(x) e^{-α x·ẑ} dx`
/// along `rho_list`.
pub fn bl_limit_check(g: &DecayG, h: &IntegrandH, z: [f64; 3], rho_list: &[f64]) -> Result<BlReport> {
    let (alpha, b, gamma) = g.decay_triple()?;
    let znorm = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
    if znorm < 1e-12 {
        return Err(Error::InvalidParams("z must be nonzero".into()));
    }
    let rhs = gamma * tilted_radial_integral(|r| h.value(r), alpha, h.extent())?;
    let mut lhs = Vec::with_capacity(rho_list.len());
    for &rho in rho_list {
        // g(x + ρz) is g centered at -ρz
        let center = [-rho * z[0], -rho * z[1], -rho * z[2]];
        let l = g.extent().max(h.extent());
        let frame = Frame::along(center, [rho * z[0], rho * z[1], rho * z[2]]);
        let f = |x: [f64; 3]| {
            let r1 = dist(x, center);
            let r2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            g.value(r1) * h.value(r2)
        };
        let raw = cylindrical_integral(&f, &frame, -l, rho * znorm + l, l, 1, 1e-8)?;
        lhs.push(raw * (alpha * rho * znorm).exp() * (rho * znorm).powf(b));
    }
    let rel_gap = ((lhs[lhs.len() - 1] - rhs) / rhs).abs();
    Ok(BlReport { rho_list: rho_list.to_vec(), lhs, rhs, rel_gap })
}

fn dist(x: [f64; 3], y: [f64; 3]) -> f64 {
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

/// `(a+b)^p ≥ a^p + b^p + (p-1)(a^{p-1}b + ab^{p-1})` for `a, b ≥ 0`,
/// `p ≥ 2`, allowing rounding-level slack.
pub fn power_inequality(a: f64, b: f64, p: f64) -> bool {
    let lhs = (a + b).powf(p);
    let rhs = a.powf(p) + b.powf(p) + (p - 1.0) * (a.powf(p - 1.0) * b + a * b.powf(p - 1.0));
    lhs - rhs >= -1e-12 * lhs.abs().max(1.0)
}

/// The sign-determining coefficient of the `δ_ρ` term in the two-bump
/// energy expansion; `lp_norm` is `|w|_p`.
pub fn gamma_function(s: f64, c1: f64, lp_norm: f64, p: f64) -> f64 {
    let u = 1.0 - s;
    let sum2 = u * u + s * s;
    let sump = u.powf(p) + s.powf(p);
    let sumpm2 = u.powf(p - 2.0) + s.powf(p - 2.0);
    let paren = 1.0 - (p - 1.0) / p * sum2 / sump * sumpm2;
    2.0 * s * u * c1 / (sump.powf(2.0 / p) * lp_norm * lp_norm) * paren
}

/// Per-`s` comparison of the quadrature two-bump norms against the
/// expansion's main terms.
#[derive(Debug, Clone)]
pub struct ExpansionRow {
    pub s: f64,
    pub norm_sq: f64,
    pub norm_main: f64,
    pub norm_within: bool,
    pub lp_p: f64,
    pub lp_main: f64,
    pub lp_within: bool,
}

#[derive(Debug, Clone)]
pub struct ExpansionReport {
    pub rho: f64,
    pub delta: f64,
    pub c1: f64,
    pub rows: Vec<ExpansionRow>,
}

impl ExpansionReport {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.norm_within && r.lp_within)
    }

    /// CSV with columns `s,norm_sq,norm_main,norm_within,lp_p,lp_main,lp_within`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "s,norm_sq,norm_main,norm_within,lp_p,lp_main,lp_within")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{:.17e},{:.17e},{},{:.17e},{:.17e},{}",
                r.s, r.norm_sq, r.norm_main, r.norm_within, r.lp_p, r.lp_main, r.lp_within
            )?;
        }
        Ok(())
    }
}

/// Checks, for each `s`, that `‖ψ_ρ[s,-e₁]‖²` and `|ψ_ρ[s,-e₁]|_p^p` sit
/// within the configured brackets around the expansion's main terms
/// (`lo_mult`/`hi_mult` multiples of `c₁δ_ρ` below and above; defaults
/// 0.5 and 2).
pub fn two_bump_expansion_check(
    profile: &Arc<RadialProfile>,
    rho: f64,
    s_list: &[f64],
    c1: f64,
    lo_mult: f64,
    hi_mult: f64,
) -> Result<ExpansionReport> {
    let params = profile.params;
    let p = params.p;
    let delta = delta_rho(rho, params.n);
    let base = profile.norm_bundle()?;
    let slack = c1 * delta;
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let u = 1.0 - s;
        let field = BumpField::new(
            vec![
                BumpTerm { profile: profile.clone(), center: [rho, 0.0, 0.0], coeff: u },
                BumpTerm { profile: profile.clone(), center: [-rho, 0.0, 0.0], coeff: s },
            ],
            DomainSpec::WholeSpace,
        )?;
        let cross = cross_h1(profile, [rho, 0.0, 0.0], [-rho, 0.0, 0.0])?;
        let norm_sq = (u * u + s * s) * base.norm_a_sq + 2.0 * s * u * cross;
        let norm_main = (u * u + s * s) * base.norm_a_sq + 2.0 * s * u * c1 * delta;
        let lp_p = crate::fields::lebesgue_norm(&field, p)?.powf(p);
        let lp_main = (u.powf(p) + s.powf(p)) * base.lp_p
            + (p - 1.0) * (u.powf(p - 1.0) * s + u * s.powf(p - 1.0)) * c1 * delta;
        rows.push(ExpansionRow {
            s,
            norm_sq,
            norm_main,
            norm_within: norm_sq >= norm_main - lo_mult * slack
                && norm_sq <= norm_main + hi_mult * slack,
            lp_p,
            lp_main,
            lp_within: lp_p >= lp_main - lo_mult * slack && lp_p <= lp_main + hi_mult * slack,
        });
    }
    Ok(ExpansionReport { rho, delta, c1, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;
    use crate::radial::{shoot_ground_state, ShootConfig};
    use once_cell::sync::Lazy;
    use proptest::prelude::*;

    static W: Lazy<Arc<RadialProfile>> = Lazy::new(|| {
        let params = ProblemParams::new(3, 4.0, 0.0).unwrap();
        let cfg = ShootConfig { rk_step: 4e-3, n_nodes: 2000, ..Default::default() };
        Arc::new(shoot_ground_state(&params, &cfg).unwrap())
    });

    #[test]
    fn delta_rho_values() {
        let v = delta_rho(10.0, 3);
        assert!((v - 1.0 / (10.0 * (20.0f64).exp())).abs() < 1e-25);
        // doubling ρ multiplies by 2^{-(N-1)/2} e^{-2ρ}
        let r = delta_rho(20.0, 3) / delta_rho(10.0, 3);
        assert!((r / (2.0f64.powf(-1.0) * (-20.0f64).exp()) - 1.0).abs() < 1e-10);
        // dimension step N=3 → N=5 divides by ρ
        assert!((delta_rho(7.0, 3) / delta_rho(7.0, 5) - 7.0).abs() < 1e-10);
    }

    #[test]
    fn c1_plateau_and_oracle() {
        let report = estimate_c1(&W, &[3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(report.plateau_drift < 0.05, "drift {}", report.plateau_drift);
        assert!(report.c1_estimate > 0.0);
        assert!(report.gamma_half < 0.0);
        let oracle = c1_oracle(&W).unwrap();
        let gap = ((report.c1_estimate - oracle) / oracle).abs();
        assert!(gap < 0.03, "estimate {} oracle {} gap {}", report.c1_estimate, oracle, gap);
    }

    #[test]
    fn c1_exponent_swap_symmetric() {
        let rho = 5.0;
        let a = raw_cross_integral(&W, 3.0, 1.0, rho).unwrap();
        let b = raw_cross_integral(&W, 1.0, 3.0, rho).unwrap();
        assert!(((a - b) / a).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn c1_different_exponent_pair_differs() {
        let rho = 5.0;
        let a = raw_cross_integral(&W, 3.0, 1.0, rho).unwrap();
        let b = raw_cross_integral(&W, 2.0, 1.0, rho).unwrap();
        assert!(((a - b) / a).abs() > 0.1);
    }

    #[test]
    fn plateau_failure_reported() {
        // ρ far too small for the asymptotic regime
        let err = estimate_c1(&W, &[0.2, 0.4, 0.6, 0.8]).unwrap_err();
        assert!(matches!(err, Error::PlateauNotReached { .. }));
    }

    #[test]
    fn bl_profile_case() {
        let g = DecayG::Profile(W.clone());
        let h = IntegrandH::ProfilePower(W.clone(), 3.0);
        let report = bl_limit_check(&g, &h, [2.0, 0.0, 0.0], &[3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(report.rel_gap < 0.03, "gap {}", report.rel_gap);
        // the largest-ρ gap is no worse than the smallest-ρ one
        let g0 = ((report.lhs[0] - report.rhs) / report.rhs).abs();
        assert!(report.rel_gap <= g0 + 1e-3, "gaps {g0} -> {}", report.rel_gap);
    }

    #[test]
    fn bl_pure_exponential_case() {
        let g = DecayG::PureExp;
        let h = IntegrandH::MollifiedBump { radius: 2.0 };
        let report = bl_limit_check(&g, &h, [0.0, 3.0, 0.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!(report.rel_gap < 0.03, "gap {}", report.rel_gap);
        // even h: flipping z leaves the target unchanged
        let flipped = bl_limit_check(&g, &h, [0.0, -3.0, 0.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((report.rhs - flipped.rhs).abs() < 1e-12 * report.rhs);
    }

    #[test]
    fn power_inequality_edge_cases() {
        assert!(power_inequality(1.0, 1.0, 2.0));
        assert!(power_inequality(1.0, 0.0, 3.5));
        assert!(power_inequality(0.0, 0.0, 2.0));
        assert!(power_inequality(2.0, 3.0, 2.7));
        // strict slack away from the boundary
        let lhs = 5.0f64.powf(2.7);
        let rhs = 2.0f64.powf(2.7)
            + 3.0f64.powf(2.7)
            + 1.7 * (2.0f64.powf(1.7) * 3.0 + 2.0 * 3.0f64.powf(1.7));
        assert!(lhs > rhs + 1.0);
    }

    proptest! {
        #[test]
        fn power_inequality_random(a in 0.0..100.0f64, b in 0.0..100.0f64, p in 2.0..6.0f64) {
            prop_assert!(power_inequality(a, b, p));
        }

        #[test]
        fn gamma_symmetric(s in 0.0..=1.0f64) {
            let g1 = gamma_function(s, 1.3, 2.0, 4.0);
            let g2 = gamma_function(1.0 - s, 1.3, 2.0, 4.0);
            prop_assert!((g1 - g2).abs() <= 1e-12 * g1.abs().max(1.0));
        }
    }

    #[test]
    fn gamma_endpoints_and_degeneration() {
        assert_eq!(gamma_function(0.0, 1.0, 2.0, 4.0), 0.0);
        assert_eq!(gamma_function(1.0, 1.0, 2.0, 4.0), 0.0);
        assert!(gamma_function(0.5, 1.0, 2.0, 4.0) < 0.0);
        // at p = 2 the parenthesis vanishes identically
        for s in [0.2, 0.5, 0.8] {
            assert!(gamma_function(s, 1.0, 2.0, 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn expansion_brackets_hold() {
        let report = estimate_c1(&W, &[3.0, 4.0, 5.0, 6.0]).unwrap();
        let exp = two_bump_expansion_check(
            &W,
            5.0,
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            report.c1_estimate,
            0.5,
            2.0,
        )
        .unwrap();
        assert!(exp.all_within(), "rows: {:?}", exp.rows);
        // s = 0 reduces to a single bump
        let row0 = &exp.rows[0];
        let base = W.norm_bundle().unwrap();
        assert!((row0.norm_sq - base.norm_a_sq).abs() < 1e-9 * base.norm_a_sq);
        assert!((row0.lp_p - base.lp_p).abs() < 1e-6 * base.lp_p);
    }

    #[test]
    fn cross_part_is_exactly_bilinear() {
        let s = 0.3;
        let u = 1.0 - s;
        let rho = 4.0;
        let field = BumpField::new(
            vec![
                BumpTerm { profile: W.clone(), center: [rho, 0.0, 0.0], coeff: u },
                BumpTerm { profile: W.clone(), center: [-rho, 0.0, 0.0], coeff: s },
            ],
            DomainSpec::WholeSpace,
        )
        .unwrap();
        let b = crate::fields::norm_bundle(&field, &crate::potential::PotentialSpec::unit()).unwrap();
        let base = W.norm_bundle().unwrap();
        let cross = cross_h1(&W, [rho, 0.0, 0.0], [-rho, 0.0, 0.0]).unwrap();
        let manual = (u * u + s * s) * base.norm_a_sq + 2.0 * s * u * cross;
        assert!((b.norm_a_sq - manual).abs() < 1e-10 * manual);
    }
}
