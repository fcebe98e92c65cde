//! Two-bump min-max machinery: the family `ψ_ρ[s,y]` over `[0,1] × Σ`
//! with `Σ = ∂B₂(e₁)`, the scan levels `A` (full grid max) and `B`
//! (`s = 1` slice max), the barycenter map `β`, the axis search for a
//! `β`-zero, and the inequality-chain report.

use crate::error::Error;
use crate::fields::{BumpField, BumpTerm, DomainSpec};
use crate::nehari::{self, NormBundle};
use crate::params::ProblemParams;
use crate::potential::PotentialSpec;
use crate::quad::gauss_legendre;
use crate::radial::RadialProfile;
use crate::report::{Check, EnergyLedger};
use crate::Result;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// A point of `Σ = ∂B₂(e₁)`, kept on the sphere exactly by renormalizing
/// the chart direction.
#[derive(Debug, Clone, Copy)]
pub struct SigmaPoint {
    pub y: [f64; 3],
    pub azimuth: f64,
    pub polar: f64,
}

impl SigmaPoint {
    /// Chart map: polar angle 0 points along `+e₁` (so `y = 3e₁`),
    /// polar angle π gives `y = -e₁`.
    pub fn from_angles(azimuth: f64, polar: f64) -> SigmaPoint {
        let dir = [
            polar.cos(),
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
        ];
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        SigmaPoint {
            y: [
                1.0 + 2.0 * dir[0] / n,
                2.0 * dir[1] / n,
                2.0 * dir[2] / n,
            ],
            azimuth,
            polar,
        }
    }

    pub fn antipode() -> SigmaPoint {
        SigmaPoint::from_angles(0.0, std::f64::consts::PI)
    }
}

/// The standard Σ sampling: `n_az × n_polar` interior chart points plus
/// the two poles.
pub fn sigma_grid(n_az: usize, n_polar: usize) -> Vec<SigmaPoint> {
    let mut grid = Vec::with_capacity(n_az * n_polar + 2);
    grid.push(SigmaPoint::from_angles(0.0, 0.0));
    for j in 1..=n_polar {
        let polar = std::f64::consts::PI * j as f64 / (n_polar + 1) as f64;
        for k in 0..n_az {
            let azimuth = 2.0 * std::f64::consts::PI * k as f64 / n_az as f64;
            grid.push(SigmaPoint::from_angles(azimuth, polar));
        }
    }
    grid.push(SigmaPoint::antipode());
    grid
}

/// `ψ_ρ[s,y] = ϑ · [(1-s) w(· - ρe₁) + s w(· - ρy)]`; the cutoff is
/// present exactly when the domain is exterior.
pub fn make_psi(
    profile: &Arc<RadialProfile>,
    s: f64,
    y: &SigmaPoint,
    rho: f64,
    domain: &DomainSpec,
) -> Result<BumpField> {
    BumpField::new(
        vec![
            BumpTerm { profile: profile.clone(), center: [rho, 0.0, 0.0], coeff: 1.0 - s },
            BumpTerm {
                profile: profile.clone(),
                center: [rho * y.y[0], rho * y.y[1], rho * y.y[2]],
                coeff: s,
            },
        ],
        domain.clone(),
    )
}

/// One evaluated point of the `(s, y)` scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub s: f64,
    pub y: SigmaPoint,
    pub t: f64,
    pub energy: f64,
    pub beta: [f64; 3],
    pub bundle: NormBundle,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    /// Max of `E_ε(t ψ_ρ[s,y])` over the full grid.
    pub a_level: f64,
    /// Max over the `s = 1` slice.
    pub b_level: f64,
    pub scan: Vec<ScanPoint>,
}

impl ScanResult {
    /// Scan CSV with columns `s,azimuth,polar,t,energy,beta_x,beta_y,beta_z`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "s,azimuth,polar,t,energy,beta_x,beta_y,beta_z")?;
        for p in &self.scan {
            writeln!(
                f,
                "{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                p.s, p.y.azimuth, p.y.polar, p.t, p.energy, p.beta[0], p.beta[1], p.beta[2]
            )?;
        }
        Ok(())
    }
}

fn projected_energy(bundle: &NormBundle, params: &ProblemParams) -> Result<(f64, f64)> {
    let proj = nehari::project_to_nehari(bundle, params)?;
    Ok((proj.t, proj.energy_at_t))
}

/// Evaluates `E_ε(t ψ_ρ[s,y])` and `β` over the `s × Σ` grid. For the
/// unit potential on the whole space the norms depend on `(s, |z₁ - z₂|)`
/// only and `|z₁ - z₂| = 2ρ` on all of Σ, so one bundle per `s` serves
/// the entire slice.
pub fn scan_levels(
    profile: &Arc<RadialProfile>,
    params: &ProblemParams,
    rho: f64,
    s_count: usize,
    sigma: &[SigmaPoint],
    domain: &DomainSpec,
    potential: &PotentialSpec,
    bary_cfg: &BarycenterConfig,
) -> Result<ScanResult> {
    if s_count < 2 || sigma.is_empty() {
        return Err(Error::InvalidParams("scan grids must be nonempty".into()));
    }
    let s_values: Vec<f64> =
        (0..s_count).map(|i| i as f64 / (s_count - 1) as f64).collect();
    let symmetric = potential.is_unit() && domain.hole_radius().is_none();
    let shared: Option<Vec<NormBundle>> = if symmetric {
        let anti = SigmaPoint::antipode();
        let bundles: Result<Vec<NormBundle>> = s_values
            .par_iter()
            .map(|&s| {
                let field = make_psi(profile, s, &anti, rho, domain)?;
                crate::fields::norm_bundle(&field, potential)
            })
            .collect();
        Some(bundles?)
    } else {
        None
    };

    let mut tasks = Vec::new();
    for (i, &s) in s_values.iter().enumerate() {
        for y in sigma {
            tasks.push((i, s, *y));
        }
    }
    let scan: Result<Vec<ScanPoint>> = tasks
        .par_iter()
        .map(|&(i, s, y)| {
            let field = make_psi(profile, s, &y, rho, domain)?;
            let bundle = match &shared {
                Some(b) => b[i].clone(),
                None => crate::fields::norm_bundle(&field, potential)?,
            };
            let (t, energy) = projected_energy(&bundle, params)?;
            let beta = barycenter_with(&field, bary_cfg)?;
            Ok(ScanPoint { s, y, t, energy, beta, bundle })
        })
        .collect();
    let scan = scan?;
    let a_level = scan.iter().map(|p| p.energy).fold(f64::NEG_INFINITY, f64::max);
    let b_level = scan
        .iter()
        .filter(|p| p.s == 1.0)
        .map(|p| p.energy)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ScanResult { a_level, b_level, scan })
}

/// Lattice parameters of the barycenter quadrature.
#[derive(Debug, Clone, Copy)]
pub struct BarycenterConfig {
    pub spacing: f64,
    pub floor: f64,
}

impl Default for BarycenterConfig {
    fn default() -> Self {
        BarycenterConfig { spacing: 0.25, floor: 1e-14 }
    }
}

/// Fixed 128-point rule for the unit-ball average: 4 Gauss points in
/// radius against `ρ²dρ`, 8×4 points on the sphere.
fn ball_rule() -> Vec<([f64; 3], f64)> {
    let (rx, rw) = gauss_legendre(4);
    let (cx, cw) = gauss_legendre(4);
    let mut rule = Vec::with_capacity(128);
    let radial_norm: f64 = rx
        .iter()
        .zip(&rw)
        .map(|(x, w)| {
            let rho = 0.5 * (1.0 + x);
            w * rho * rho
        })
        .sum();
    for (x, w) in rx.iter().zip(&rw) {
        let rho = 0.5 * (1.0 + x);
        let wr = w * rho * rho / radial_norm;
        for (c, wc) in cx.iter().zip(&cw) {
            let sin_t = (1.0 - c * c).sqrt();
            for k in 0..8 {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 8.0;
                rule.push((
                    [rho * c, rho * sin_t * phi.cos(), rho * sin_t * phi.sin()],
                    wr * wc / 2.0 / 8.0,
                ));
            }
        }
    }
    rule
}

fn mu_at(field: &BumpField, x: [f64; 3], rule: &[([f64; 3], f64)]) -> f64 {
    rule.iter()
        .map(|&(o, w)| w * field.eval([x[0] + o[0], x[1] + o[1], x[2] + o[2]]).abs())
        .sum()
}

/// Pointwise upper bound for the ball average: `Σ cᵢ w(max(0, |x-zᵢ|-1))`,
/// valid because the profile is radially decreasing and the cutoff is
/// bounded by 1.
fn mu_upper_bound(field: &BumpField, x: [f64; 3]) -> f64 {
    field
        .terms
        .iter()
        .map(|t| {
            let d = ((x[0] - t.center[0]).powi(2)
                + (x[1] - t.center[1]).powi(2)
                + (x[2] - t.center[2]).powi(2))
            .sqrt();
            t.coeff * t.profile.eval((d - 1.0).max(0.0))
        })
        .sum()
}

/// Largest radius at which the upper bound built from a single center can
/// still reach `level`; nodes farther than this from every center cannot
/// contribute.
fn reach_radius(field: &BumpField, level: f64) -> f64 {
    let ctot: f64 = field.terms.iter().map(|t| t.coeff).sum();
    let profile = &field.terms[0].profile;
    let target = level / ctot.max(1e-300);
    if profile.eval(0.0) <= target {
        return 1.0;
    }
    let mut lo = 0.0;
    let mut hi = profile.r_max;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if profile.eval(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 + hi
}

/// All lattice nodes (global alignment to multiples of the spacing)
/// within `radius` of some bump center.
fn lattice_nodes(field: &BumpField, radius: f64, spacing: f64) -> Vec<[f64; 3]> {
    let mut nodes = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for t in &field.terms {
        let lo: Vec<i64> = t
            .center
            .iter()
            .map(|c| ((c - radius) / spacing).floor() as i64)
            .collect();
        let hi: Vec<i64> = t
            .center
            .iter()
            .map(|c| ((c + radius) / spacing).ceil() as i64)
            .collect();
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    let x = [
                        i as f64 * spacing,
                        j as f64 * spacing,
                        k as f64 * spacing,
                    ];
                    let d2 = (x[0] - t.center[0]).powi(2)
                        + (x[1] - t.center[1]).powi(2)
                        + (x[2] - t.center[2]).powi(2);
                    if d2 <= radius * radius && seen.insert((i, j, k)) {
                        nodes.push(x);
                    }
                }
            }
        }
    }
    nodes
}

pub fn barycenter(field: &BumpField) -> Result<[f64; 3]> {
    barycenter_with(field, &BarycenterConfig::default())
}

/// `β(u)`: the normalized first moment of `û = [μ - (1/2) max μ]⁺` where
/// `μ` is the unit-ball average of `|u|`, evaluated on a lattice. The
/// upper bound on `μ` restricts both the max search and the support scan
/// to balls around the bump centers.
pub fn barycenter_with(field: &BumpField, cfg: &BarycenterConfig) -> Result<[f64; 3]> {
    if field.terms.is_empty() || field.terms.iter().all(|t| t.coeff == 0.0) {
        return Err(Error::DegenerateField(0.0));
    }
    let rule = ball_rule();
    // seed the max with nodes near the centers
    let seed_nodes = lattice_nodes(field, 2.0, cfg.spacing);
    let mut mu_max = seed_nodes
        .par_iter()
        .map(|&x| mu_at(field, x, &rule))
        .reduce(|| 0.0, f64::max);
    if mu_max < cfg.floor {
        return Err(Error::DegenerateField(mu_max));
    }
    // any node beating the seed max must satisfy the upper bound
    let search = lattice_nodes(field, reach_radius(field, mu_max), cfg.spacing);
    mu_max = search
        .par_iter()
        .filter(|&&x| mu_upper_bound(field, x) > mu_max)
        .map(|&x| mu_at(field, x, &rule))
        .reduce(|| mu_max, f64::max);
    let threshold = 0.5 * mu_max;
    let support = lattice_nodes(field, reach_radius(field, threshold), cfg.spacing);
    let (sum, moment) = support
        .par_iter()
        .map(|&x| {
            if mu_upper_bound(field, x) < threshold {
                return (0.0, [0.0; 3]);
            }
            let v = (mu_at(field, x, &rule) - threshold).max(0.0);
            (v, [v * x[0], v * x[1], v * x[2]])
        })
        .reduce(
            || (0.0, [0.0; 3]),
            |a, b| (a.0 + b.0, [a.1[0] + b.1[0], a.1[1] + b.1[1], a.1[2] + b.1[2]]),
        );
    if sum <= 0.0 {
        return Err(Error::DegenerateField(mu_max));
    }
    Ok([moment[0] / sum, moment[1] / sum, moment[2] / sum])
}

/// Outcome of the axis bisection for a zero of the barycenter.
#[derive(Debug, Clone)]
pub struct BetaZero {
    pub s_star: f64,
    /// `(s_lo, s_hi, β_x(s_lo), β_x(s_hi))` of the final bracket.
    pub bracket: (f64, f64, f64, f64),
    /// `E_ε` at the Nehari projection of `ψ_ρ[s*, -e₁]`; an upper bound
    /// for the linking level.
    pub certificate_energy: f64,
    /// Smallest sampled value of `β(ψ_ρ[1,y]) · y` in the precondition.
    pub precondition_margin: f64,
}

/// Verifies `β(ψ_ρ[1,y]) · y > 0` on sampled `y`, then bisects
/// `s ↦ β_x(ψ_ρ[s, -e₁])` for its sign change.
pub fn find_beta_zero(
    profile: &Arc<RadialProfile>,
    params: &ProblemParams,
    rho: f64,
    domain: &DomainSpec,
    potential: &PotentialSpec,
    bary_cfg: &BarycenterConfig,
) -> Result<BetaZero> {
    let mut precondition_margin = f64::INFINITY;
    let probes: Vec<SigmaPoint> = sigma_grid(6, 2);
    for y in &probes {
        let field = make_psi(profile, 1.0, y, rho, domain)?;
        let b = barycenter_with(&field, bary_cfg)?;
        let dot = b[0] * y.y[0] + b[1] * y.y[1] + b[2] * y.y[2];
        if dot <= 0.0 {
            return Err(Error::NoSignChange(format!(
                "precondition beta.y > 0 fails at polar {:.3}, azimuth {:.3}: {dot:.3e}",
                y.polar, y.azimuth
            )));
        }
        precondition_margin = precondition_margin.min(dot);
    }

    let anti = SigmaPoint::antipode();
    let beta_x = |s: f64| -> Result<f64> {
        let field = make_psi(profile, s, &anti, rho, domain)?;
        Ok(barycenter_with(&field, bary_cfg)?[0])
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut f_lo = beta_x(lo)?;
    let mut f_hi = beta_x(hi)?;
    if f_lo <= 0.0 || f_hi >= 0.0 {
        return Err(Error::NoSignChange(format!(
            "axis endpoints do not bracket: beta_x(0) = {f_lo:.3e}, beta_x(1) = {f_hi:.3e}"
        )));
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        let f_mid = beta_x(mid)?;
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let s_star = 0.5 * (lo + hi);
    let field = make_psi(profile, s_star, &anti, rho, domain)?;
    let bundle = crate::fields::norm_bundle(&field, potential)?;
    let (_, certificate_energy) = projected_energy(&bundle, params)?;
    Ok(BetaZero {
        s_star,
        bracket: (lo, hi, f_lo, f_hi),
        certificate_energy,
        precondition_margin,
    })
}

/// Assembles the level-ordering report: `B < Ĉ ≤ A`, `A < 2m_ε`,
/// `m < A < 2m`, and `Ĉ > m`, each with its numeric margin. `Ĉ` is the
/// certificate energy, an upper bound for the linking level coming from
/// the β-zero candidate only.
///
/// `profile` must be the ground state of the *same* `(p, ε)` problem as
/// `params`. A balanced pair of such bumps tops out at `2 m_ε` minus an
/// interaction correction of order `δ_ρ`, so `A < 2m_ε` holds with a
/// margin that shrinks exponentially in `ρ`. Generating the path from a
/// mismatched profile (for example the `ε = 0` state) shifts the single
/// bump level above `m_ε` by an `ε`-dependent amount that the `δ_ρ`
/// correction cannot beat, and the check genuinely fails.
pub fn inequality_chain_report(
    profile: &Arc<RadialProfile>,
    params: &ProblemParams,
    m: f64,
    m_eps: f64,
    rho: f64,
    s_count: usize,
    sigma: &[SigmaPoint],
    domain: &DomainSpec,
    potential: &PotentialSpec,
    bary_cfg: &BarycenterConfig,
) -> Result<(EnergyLedger, ScanResult, BetaZero)> {
    let scan = scan_levels(profile, params, rho, s_count, sigma, domain, potential, bary_cfg)?;
    let zero = find_beta_zero(profile, params, rho, domain, potential, bary_cfg)?;
    let mut ledger = EnergyLedger { m, ..Default::default() };
    ledger.m_eps.insert(crate::report::eps_key(params.eps), m_eps);
    let a = scan.a_level;
    let b = scan.b_level;
    let c_hat = zero.certificate_energy;
    ledger.record(Check::less("B<C_hat", b, c_hat));
    ledger.record(Check::less_eq("C_hat<=A", c_hat, a, 1e-10 * a));
    ledger.record(Check::less("A<2m_eps", a, 2.0 * m_eps));
    ledger.record(Check::less("m<A", m, a));
    ledger.record(Check::less("A<2m", a, 2.0 * m));
    ledger.record(Check::less("C_hat>m", m, c_hat));
    Ok((ledger, scan, zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{shoot_ground_state, ShootConfig};
    use once_cell::sync::Lazy;

    static W: Lazy<Arc<RadialProfile>> = Lazy::new(|| {
        let params = ProblemParams::new(3, 4.0, 0.0).unwrap();
        let cfg = ShootConfig { rk_step: 4e-3, n_nodes: 2000, ..Default::default() };
        Arc::new(shoot_ground_state(&params, &cfg).unwrap())
    });

    static WEPS: Lazy<Arc<RadialProfile>> = Lazy::new(|| {
        let cfg = ShootConfig { rk_step: 4e-3, n_nodes: 2000, ..Default::default() };
        Arc::new(shoot_ground_state(&eps_params(), &cfg).unwrap())
    });

    fn eps_params() -> ProblemParams {
        ProblemParams::new(3, 4.0, 0.05).unwrap()
    }

    #[test]
    fn sigma_points_on_sphere() {
        for y in sigma_grid(16, 8) {
            let d = ((y.y[0] - 1.0).powi(2) + y.y[1].powi(2) + y.y[2].powi(2)).sqrt();
            assert!((d - 2.0).abs() < 1e-14);
        }
        assert_eq!(sigma_grid(16, 8).len(), 16 * 8 + 2);
        let anti = SigmaPoint::antipode();
        assert!((anti.y[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn barycenter_radial_is_zero() {
        let field = BumpField::single(W.clone(), [0.0, 0.0, 0.0], DomainSpec::WholeSpace).unwrap();
        let b = barycenter(&field).unwrap();
        let n = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        assert!(n < 0.5, "beta of a centered bump: {b:?}");
    }

    #[test]
    fn barycenter_scaling_invariance() {
        let mk = |c: f64| {
            BumpField::new(
                vec![
                    BumpTerm { profile: W.clone(), center: [3.0, 1.0, 0.0], coeff: 0.7 * c },
                    BumpTerm { profile: W.clone(), center: [-2.0, 0.0, 1.0], coeff: 0.4 * c },
                ],
                DomainSpec::WholeSpace,
            )
            .unwrap()
        };
        let b1 = barycenter(&mk(1.0)).unwrap();
        let b3 = barycenter(&mk(3.0)).unwrap();
        for i in 0..3 {
            assert!((b1[i] - b3[i]).abs() < 1e-12, "{b1:?} vs {b3:?}");
        }
    }

    #[test]
    fn barycenter_translation_equivariance() {
        let spacing = BarycenterConfig::default().spacing;
        let shift = [2.0, -1.5, 0.5];
        let f0 = BumpField::single(W.clone(), [1.0, 0.5, 0.0], DomainSpec::WholeSpace).unwrap();
        let f1 = BumpField::single(
            W.clone(),
            [1.0 + shift[0], 0.5 + shift[1], shift[2]],
            DomainSpec::WholeSpace,
        )
        .unwrap();
        let b0 = barycenter(&f0).unwrap();
        let b1 = barycenter(&f1).unwrap();
        for i in 0..3 {
            assert!(
                (b1[i] - b0[i] - shift[i]).abs() < 2.0 * spacing,
                "{b0:?} + {shift:?} vs {b1:?}"
            );
        }
    }

    #[test]
    fn barycenter_tracks_cut_translated_bump() {
        // β(ϑ w(· - ρy)) - ρy shrinks as ρ grows
        let domain = DomainSpec::Exterior { hole_radius: 1.0 };
        let mut gaps = Vec::new();
        for rho in [4.0, 6.0, 8.0] {
            let field =
                BumpField::single(W.clone(), [rho, 0.0, 0.0], domain.clone()).unwrap();
            let b = barycenter(&field).unwrap();
            gaps.push(((b[0] - rho).powi(2) + b[1] * b[1] + b[2] * b[2]).sqrt());
        }
        assert!(gaps[2] <= gaps[0] + 1e-9, "gaps {gaps:?}");
        assert!(gaps[2] < 0.5, "gaps {gaps:?}");
    }

    #[test]
    fn degenerate_field_rejected() {
        let field = BumpField::new(
            vec![BumpTerm { profile: W.clone(), center: [0.0; 3], coeff: 0.0 }],
            DomainSpec::WholeSpace,
        )
        .unwrap();
        assert!(matches!(barycenter(&field), Err(Error::DegenerateField(_))));
    }

    #[test]
    fn scan_chain_whole_space() {
        let params = eps_params();
        let sigma = sigma_grid(4, 2);
        let base = W.norm_bundle().unwrap();
        let m = nehari::energy(&base, &ProblemParams::new(3, 4.0, 0.0).unwrap());
        let cfg = ShootConfig { rk_step: 4e-3, n_nodes: 2000, ..Default::default() };
        let m_eps = crate::levels::compute_m_eps(&params, &cfg).unwrap();
        let (ledger, scan, zero) = inequality_chain_report(
            &WEPS,
            &params,
            m,
            m_eps,
            6.0,
            11,
            &sigma,
            &DomainSpec::WholeSpace,
            &PotentialSpec::unit(),
            &BarycenterConfig::default(),
        )
        .unwrap();
        assert!(ledger.all_pass(), "failures: {:?}", ledger.failures().collect::<Vec<_>>());
        assert!(scan.b_level <= scan.a_level);
        assert!((zero.s_star - 0.5).abs() < 2e-3, "s* = {}", zero.s_star);
        // max of the grid sits at the balanced configuration
        let best = scan
            .scan
            .iter()
            .max_by(|a, b| a.energy.total_cmp(&b.energy))
            .unwrap();
        assert!((best.s - 0.5).abs() < 0.11, "max at s = {}", best.s);
        // every scan point is on the Nehari set and recomputable
        for p in &scan.scan {
            let res = crate::nehari::residual(&p.bundle, &params, p.t);
            assert!(res.abs() < 1e-10 * p.bundle.norm_a_sq);
            let again = nehari::energy_at(&p.bundle, &params, p.t);
            assert!((again - p.energy).abs() < 1e-10 * p.energy.abs());
        }
        // s = 1 slice energies coincide across y (translation invariance)
        let slice: Vec<f64> =
            scan.scan.iter().filter(|p| p.s == 1.0).map(|p| p.energy).collect();
        for e in &slice {
            assert!((e - slice[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetry_in_s() {
        let params = eps_params();
        let anti = SigmaPoint::antipode();
        let e_at = |s: f64| {
            let field = make_psi(&W, s, &anti, 5.0, &DomainSpec::WholeSpace).unwrap();
            let b = crate::fields::norm_bundle(&field, &PotentialSpec::unit()).unwrap();
            projected_energy(&b, &params).unwrap().1
        };
        assert!((e_at(0.3) - e_at(0.7)).abs() < 1e-8 * e_at(0.3));
    }

    #[test]
    fn beta_zero_exterior_symmetric() {
        let params = eps_params();
        let zero = find_beta_zero(
            &W,
            &params,
            6.0,
            &DomainSpec::Exterior { hole_radius: 1.0 },
            &PotentialSpec::unit(),
            &BarycenterConfig::default(),
        )
        .unwrap();
        assert!((zero.s_star - 0.5).abs() < 2e-3, "s* = {}", zero.s_star);
        assert!(zero.precondition_margin > 0.0);
    }

    #[test]
    fn beta_zero_needs_separation() {
        let params = eps_params();
        let bary = BarycenterConfig::default();
        // at ρ = 0 the two bumps coincide, β vanishes on the whole path and
        // the endpoint probes cannot bracket a sign change
        let err = find_beta_zero(
            &W,
            &params,
            0.0,
            &DomainSpec::WholeSpace,
            &PotentialSpec::unit(),
            &bary,
        );
        assert!(matches!(err, Err(Error::NoSignChange(_)) | Err(Error::DegenerateField(_))));
        // the bracketing margin grows with the separation
        let mut last = 0.0;
        for rho in [0.1, 0.4, 1.6] {
            let zero = find_beta_zero(
                &W,
                &params,
                rho,
                &DomainSpec::WholeSpace,
                &PotentialSpec::unit(),
                &bary,
            )
            .unwrap();
            assert!(zero.precondition_margin > last, "margin not growing at rho = {rho}");
            last = zero.precondition_margin;
        }
    }
}
