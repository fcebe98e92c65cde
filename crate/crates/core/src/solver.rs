//! Projected-gradient minimization of `E_ε` on the Nehari set for radial
//! nonautonomous potentials, plus the ground-state criterion checks and
//! the escaping-bump diagnostic for potentials above 1.

use crate::error::Error;
use crate::fields::{BumpField, DomainSpec};
use crate::nehari::{self, NormBundle};
use crate::params::ProblemParams;
use crate::potential::PotentialSpec;
use crate::quad::{gauss_legendre, sphere_area};
use crate::radial::RadialProfile;
use crate::report::Check;
use crate::Result;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub n_nodes: usize,
    pub r_max: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { n_nodes: 700, r_max: 35.0, max_iters: 400, grad_tol: 1e-6 }
    }
}

/// Piecewise-linear radial discretization of `E_ε`; energy, gradient and
/// Nehari bundle all come from the same per-element quadrature so they
/// are mutually consistent.
pub struct RadialSystem {
    pub grid: Vec<f64>,
    /// Lumped node weights `∫ φ_i r^(N-1) dr` (used for the gradient norm).
    pub weights: Vec<f64>,
    /// Element stiffness weights `∫_elem r^(N-1) dr`.
    stiff: Vec<f64>,
    /// Potential values at the nodes (preconditioner only).
    a: Vec<f64>,
    /// Per-element quadrature: barycentric coordinate, weight including
    /// `r^(N-1)`, and the potential value, `QPE` points per element. Mass
    /// and nonlinear terms integrate the piecewise-linear interpolant
    /// consistently; lumping them instead lets single-node spikes cheat
    /// the critical term and collapse below the concentration level.
    qxi: Vec<f64>,
    qw: Vec<f64>,
    qa: Vec<f64>,
    /// Nodes pinned by the boundary conditions.
    fixed: Vec<bool>,
    pub params: ProblemParams,
    omega: f64,
    h: f64,
}

const QPE: usize = 6;

impl RadialSystem {
    pub fn new(
        potential: &PotentialSpec,
        domain: &DomainSpec,
        params: &ProblemParams,
        cfg: &SolverConfig,
    ) -> Result<RadialSystem> {
        potential.floor()?;
        let r0 = domain.hole_radius().unwrap_or(0.0);
        if cfg.n_nodes < 8 || cfg.r_max <= r0 + 1.0 {
            return Err(Error::InvalidParams("solver mesh too small".into()));
        }
        let m = cfg.n_nodes;
        let h = (cfg.r_max - r0) / (m - 1) as f64;
        let grid: Vec<f64> = (0..m).map(|i| r0 + i as f64 * h).collect();
        let nf = params.n as f64;
        let stiff: Vec<f64> = (0..m - 1)
            .map(|e| (grid[e + 1].powf(nf) - grid[e].powf(nf)) / nf)
            .collect();
        let (gx, gw) = gauss_legendre(6);
        let hat_piece = |a: f64, b: f64, rising: bool| -> f64 {
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                let r = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let phi = if rising { (r - a) / (b - a) } else { (b - r) / (b - a) };
                s += w * phi * r.powf(nf - 1.0);
            }
            s * 0.5 * (b - a)
        };
        let mut weights = vec![0.0; m];
        for e in 0..m - 1 {
            weights[e] += hat_piece(grid[e], grid[e + 1], false);
            weights[e + 1] += hat_piece(grid[e], grid[e + 1], true);
        }
        let mut qxi = Vec::with_capacity((m - 1) * QPE);
        let mut qw = Vec::with_capacity((m - 1) * QPE);
        let mut qa = Vec::with_capacity((m - 1) * QPE);
        for e in 0..m - 1 {
            for (x, w) in gx.iter().zip(&gw) {
                let xi = 0.5 * (1.0 + x);
                let r = grid[e] + xi * h;
                qxi.push(xi);
                qw.push(w * 0.5 * h * r.powf(nf - 1.0));
                qa.push(potential.value(r));
            }
        }
        let mut fixed = vec![false; m];
        fixed[m - 1] = true;
        if r0 > 0.0 {
            fixed[0] = true;
        }
        let a = grid.iter().map(|&r| potential.value(r)).collect();
        Ok(RadialSystem {
            grid,
            weights,
            stiff,
            a,
            qxi,
            qw,
            qa,
            fixed,
            params: *params,
            omega: sphere_area(params.n),
            h,
        })
    }

    pub fn bundle(&self, u: &[f64]) -> NormBundle {
        let mut grad2 = 0.0;
        for (e, &k) in self.stiff.iter().enumerate() {
            let du = (u[e + 1] - u[e]) / self.h;
            grad2 += k * du * du;
        }
        let crit = self.params.crit_exp();
        let (mut mass_a, mut lp, mut lc, mut l2) = (0.0, 0.0, 0.0, 0.0);
        for e in 0..u.len() - 1 {
            for k in 0..QPE {
                let q = e * QPE + k;
                let xi = self.qxi[q];
                let w = self.qw[q];
                let uq = u[e] * (1.0 - xi) + u[e + 1] * xi;
                let v = uq.abs();
                mass_a += w * self.qa[q] * uq * uq;
                l2 += w * uq * uq;
                lp += w * v.powf(self.params.p);
                lc += w * v.powf(crit);
            }
        }
        NormBundle {
            norm_a_sq: self.omega * (grad2 + mass_a),
            lp_p: self.omega * lp,
            lcrit: self.omega * lc,
            l2: self.omega * l2,
        }
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        nehari::energy_at(&self.bundle(u), &self.params, 1.0)
    }

    /// Euclidean gradient of the discrete `E_ε` in the nodal values.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        let mut g = vec![0.0; m];
        for (e, &k) in self.stiff.iter().enumerate() {
            let du = (u[e + 1] - u[e]) / (self.h * self.h);
            g[e] -= k * du;
            g[e + 1] += k * du;
        }
        let crit = self.params.crit_exp();
        let p = self.params.p;
        for e in 0..m - 1 {
            for k in 0..QPE {
                let q = e * QPE + k;
                let xi = self.qxi[q];
                let w = self.qw[q];
                let uq = u[e] * (1.0 - xi) + u[e + 1] * xi;
                let av = uq.abs();
                let density = self.qa[q] * uq
                    - (av.powf(p - 2.0) * uq + self.params.eps * av.powf(crit - 2.0) * uq);
                g[e] += w * density * (1.0 - xi);
                g[e + 1] += w * density * xi;
            }
        }
        for v in &mut g {
            *v *= self.omega;
        }
        for i in 0..m {
            if self.fixed[i] {
                g[i] = 0.0;
            }
        }
        g
    }

    /// Solve `(stiffness + mass) x = rhs`, the Hessian of `1/2‖u‖_a²`,
    /// by the tridiagonal sweep; fixed nodes act as identity rows.
    fn precond_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m - 1];
        for (e, &k) in self.stiff.iter().enumerate() {
            let s = self.omega * k / (self.h * self.h);
            diag[e] += s;
            diag[e + 1] += s;
            off[e] = -s;
        }
        for i in 0..m {
            diag[i] += self.omega * self.weights[i] * self.a[i];
            if self.fixed[i] {
                diag[i] = 1.0;
                if i > 0 {
                    off[i - 1] = 0.0;
                }
                if i < m - 1 {
                    off[i] = 0.0;
                }
            }
        }
        let mut c = vec![0.0; m - 1];
        let mut d = vec![0.0; m];
        c[0] = off[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..m {
            let denom = diag[i] - off[i - 1] * c[i - 1];
            if i < m - 1 {
                c[i] = off[i] / denom;
            }
            d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; m];
        x[m - 1] = d[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }

    fn apply_fixed(&self, u: &mut [f64]) {
        for i in 0..u.len() {
            if self.fixed[i] {
                u[i] = 0.0;
            }
        }
    }

    fn weighted_norm(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveFlag {
    Converged,
    LineSearchStalled,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct LogRow {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeRun {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub flag: SolveFlag,
    pub log: Vec<LogRow>,
}

impl MinimizeRun {
    /// Run log CSV with columns `iter,energy,grad_norm,t`.
    pub fn write_log_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "iter,energy,grad_norm,t")?;
        for row in &self.log {
            writeln!(
                f,
                "{},{:.17e},{:.17e},{:.17e}",
                row.iter, row.energy, row.grad_norm, row.t
            )?;
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project(system: &RadialSystem, u: &mut [f64]) -> Result<f64> {
    let proj = nehari::project_to_nehari(&system.bundle(u), &system.params)?;
    for v in u.iter_mut() {
        *v *= proj.t;
    }
    Ok(proj.t)
}

/// Projected-gradient descent of `E_ε` on the discrete Nehari set. The
/// line search never accepts an energy increase beyond 1e-12; stalls and
/// iteration exhaustion are reported through the flag with the best
/// iterate returned.
pub fn minimize_on_nehari_radial(
    potential: &PotentialSpec,
    domain: &DomainSpec,
    params: &ProblemParams,
    init: impl Fn(f64) -> f64,
    cfg: &SolverConfig,
) -> Result<MinimizeRun> {
    let system = RadialSystem::new(potential, domain, params, cfg)?;
    let mut u: Vec<f64> = system.grid.iter().map(|&r| init(r).max(0.0)).collect();
    system.apply_fixed(&mut u);
    project(&system, &mut u)?;
    let mut energy = system.energy(&u);
    let mut best = (u.clone(), energy);
    let mut log = Vec::new();
    let mut flag = SolveFlag::MaxIters;
    let mut iterations = cfg.max_iters;
    let mut grad_norm = f64::NAN;
    let mut last_t = 1.0;

    for iter in 0..cfg.max_iters {
        let g = system.gradient(&u);
        let uu = dot(&u, &u);
        let gu = dot(&g, &u) / uu;
        let g_red: Vec<f64> = g.iter().zip(&u).map(|(gi, ui)| gi - gu * ui).collect();
        grad_norm = system.weighted_norm(&g_red);
        log.push(LogRow { iter, energy, grad_norm, t: last_t });
        if grad_norm < cfg.grad_tol {
            flag = SolveFlag::Converged;
            iterations = iter;
            break;
        }
        let mut dir = system.precond_solve(&g_red);
        system.apply_fixed(&mut dir);
        let du = dot(&dir, &u) / uu;
        for (di, ui) in dir.iter_mut().zip(&u) {
            *di -= du * ui;
        }
        let mut slope = dot(&g, &dir);
        if slope <= 0.0 {
            dir = g_red.clone();
            slope = dot(&g, &dir);
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-14 {
            let mut trial: Vec<f64> =
                u.iter().zip(&dir).map(|(ui, di)| ui - alpha * di).collect();
            system.apply_fixed(&mut trial);
            let t = match project(&system, &mut trial) {
                Ok(t) => t,
                Err(_) => {
                    alpha *= 0.5;
                    continue;
                }
            };
            let e_try = system.energy(&trial);
            if e_try <= energy - 1e-4 * alpha * slope {
                u = trial;
                energy = e_try;
                last_t = t;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            flag = SolveFlag::LineSearchStalled;
            iterations = iter;
            break;
        }
        if energy < best.1 {
            best = (u.clone(), energy);
        }
    }

    Ok(MinimizeRun {
        grid: system.grid.clone(),
        values: best.0,
        energy: best.1,
        grad_norm,
        iterations,
        flag,
        log,
    })
}

/// Discrete reference level: the same mesh and functional with `a ≡ 1` on
/// the whole space, so comparisons against minimization runs carry no
/// discretization bias.
pub fn discrete_reference_level(
    params: &ProblemParams,
    init: &RadialProfile,
    cfg: &SolverConfig,
) -> Result<f64> {
    let run = minimize_on_nehari_radial(
        &PotentialSpec::unit(),
        &DomainSpec::WholeSpace,
        params,
        |r| init.eval(r),
        cfg,
    )?;
    Ok(run.energy)
}

/// Largest relative mismatch between the analytic directional derivative
/// `⟨∇E, d⟩` and a central finite difference, over `n_dirs` random
/// directions.
pub fn gradient_check(system: &RadialSystem, u: &[f64], n_dirs: usize, seed: u64) -> f64 {
    let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
    let mut next = move || {
        // splitmix64
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64 * 2.0 - 1.0
    };
    let g = system.gradient(u);
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut worst = 0.0f64;
    for _ in 0..n_dirs {
        let mut d: Vec<f64> = (0..u.len()).map(|_| next()).collect();
        system.apply_fixed(&mut d);
        let analytic = dot(&g, &d);
        let eps = 1e-6 * scale;
        let up: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
        let um: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - eps * b).collect();
        let fd = (system.energy(&up) - system.energy(&um)) / (2.0 * eps);
        worst = worst.max((analytic - fd).abs() / analytic.abs().max(1e-12));
    }
    worst
}

/// One row of the translated-bump ground-state criterion.
#[derive(Debug, Clone)]
pub struct ConditionRow {
    pub z: [f64; 3],
    /// `‖ϑw(·-z)‖_a² / |ϑw(·-z)|_p²`.
    pub lhs: f64,
    pub satisfied: bool,
    /// Level of the ray through `ϑw(·-z)` under the subcritical energy.
    pub ray_level: f64,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Translation-invariant right side `‖w‖²_{H¹} / |w|_p²`.
    pub rhs: f64,
    pub m: f64,
    pub rows: Vec<ConditionRow>,
    pub tol: f64,
}

impl ConditionReport {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "z_x,z_y,z_z,lhs,rhs,satisfied,ray_level,m")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{},{},{:.17e},{:.17e},{},{:.17e},{:.17e}",
                r.z[0], r.z[1], r.z[2], r.lhs, self.rhs, r.satisfied, r.ray_level, self.m
            )?;
        }
        Ok(())
    }
}

/// For each `z`, compares the quotient `‖ϑw(·-z)‖_a²/|ϑw(·-z)|_p²` with
/// the translation-invariant free-space quotient; the quotient ordering is
/// equivalent to `E` along the projected ray staying below `m`.
pub fn check_condition_18_24(
    potential: &PotentialSpec,
    domain: &DomainSpec,
    params: &ProblemParams,
    profile: &Arc<RadialProfile>,
    z_grid: &[[f64; 3]],
) -> Result<ConditionReport> {
    if z_grid.is_empty() {
        return Err(Error::InvalidParams("z_grid must be nonempty".into()));
    }
    let sub = ProblemParams { eps: 0.0, ..*params };
    let base = profile.norm_bundle()?;
    let rhs = base.norm_a_sq / base.lp_p.powf(2.0 / sub.p);
    let m = nehari::energy_at(
        &base,
        &sub,
        nehari::project_to_nehari(&base, &sub)?.t,
    );
    let tol = 1e-9 * rhs;
    let mut rows = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let field = BumpField::single(profile.clone(), z, domain.clone())?;
        let b = crate::fields::norm_bundle(&field, potential)?;
        let lhs = b.norm_a_sq / b.lp_p.powf(2.0 / sub.p);
        let ray_level = nehari::energy_at(&b, &sub, nehari::project_to_nehari(&b, &sub)?.t);
        rows.push(ConditionRow { z, lhs, satisfied: lhs <= rhs + tol, ray_level });
    }
    Ok(ConditionReport { rhs, m, rows, tol })
}

#[derive(Debug, Clone)]
pub struct NonexistenceReport {
    pub n_list: Vec<f64>,
    /// `E_ε(t_n ϑ w_ε(· - n e₁))` per entry of `n_list`.
    pub energies: Vec<f64>,
    pub m_eps: f64,
    pub checks: Vec<Check>,
}

impl NonexistenceReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "n,energy,m_eps,gap")?;
        for (n, e) in self.n_list.iter().zip(&self.energies) {
            writeln!(f, "{n},{:.17e},{:.17e},{:.17e}", e, self.m_eps, e - self.m_eps)?;
        }
        Ok(())
    }
}

/// Energies of the escaping-bump family `t_n ϑ w_ε(· - n e₁)`; for a ≥ 1
/// potentials these decrease strictly toward `m_ε` from above, showing the
/// infimum is approached but never attained.
pub fn nonexistence_diagnostic(
    potential: &PotentialSpec,
    domain: &DomainSpec,
    params: &ProblemParams,
    profile: &Arc<RadialProfile>,
    n_list: &[f64],
) -> Result<NonexistenceReport> {
    if matches!(potential.sign_class(), crate::potential::SignClass::Below)
        || (potential.is_unit() && domain.hole_radius().is_none())
    {
        return Err(Error::InvalidParams(
            "diagnostic needs a potential above 1 or an exterior hole".into(),
        ));
    }
    let base = profile.norm_bundle()?;
    let m_eps = nehari::energy_at(&base, params, nehari::project_to_nehari(&base, params)?.t);
    let mut energies = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let field = BumpField::single(profile.clone(), [n, 0.0, 0.0], domain.clone())?;
        let b = crate::fields::norm_bundle(&field, potential)?;
        let e = nehari::energy_at(&b, params, nehari::project_to_nehari(&b, params)?.t);
        energies.push(e);
    }
    let mut checks = Vec::new();
    for (i, (&n, &e)) in n_list.iter().zip(&energies).enumerate() {
        checks.push(Check::less(&format!("above_m_eps(n={n})"), m_eps, e));
        if i > 0 {
            checks.push(Check::less(
                &format!("decreasing(n={}->{})", n_list[i - 1], n),
                e,
                energies[i - 1],
            ));
        }
    }
    Ok(NonexistenceReport { n_list: n_list.to_vec(), energies, m_eps, checks })
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
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let cfg = ShootConfig { rk_step: 4e-3, n_nodes: 2000, ..Default::default() };
        Arc::new(shoot_ground_state(&params, &cfg).unwrap())
    });

    fn quick_cfg() -> SolverConfig {
        SolverConfig { n_nodes: 500, ..Default::default() }
    }

    #[test]
    fn free_space_fixed_point() {
        let params = ProblemParams::new(3, 4.0, 0.0).unwrap();
        let run = minimize_on_nehari_radial(
            &PotentialSpec::unit(),
            &DomainSpec::WholeSpace,
            &params,
            |r| W.eval(r),
            &quick_cfg(),
        )
        .unwrap();
        assert_eq!(run.flag, SolveFlag::Converged);
        let b = W.norm_bundle().unwrap();
        let m = nehari::energy(&b, &params);
        assert!((run.energy - m).abs() / m < 2e-3, "{} vs {}", run.energy, m);
        assert!(run.values.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn descent_is_monotone() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let run = minimize_on_nehari_radial(
            &PotentialSpec::gaussian(-0.3, 2.0),
            &DomainSpec::WholeSpace,
            &params,
            |r| W.eval(r),
            &quick_cfg(),
        )
        .unwrap();
        for w in run.log.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12);
        }
    }

    #[test]
    fn below_class_beats_m_eps() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let cfg = quick_cfg();
        let reference = discrete_reference_level(&params, &WEPS, &cfg).unwrap();
        let run = minimize_on_nehari_radial(
            &PotentialSpec::gaussian(-0.3, 2.0),
            &DomainSpec::WholeSpace,
            &params,
            |r| WEPS.eval(r),
            &cfg,
        )
        .unwrap();
        assert_eq!(run.flag, SolveFlag::Converged);
        assert!(
            run.energy < reference - 1e-3,
            "below-class energy {} vs reference {}",
            run.energy,
            reference
        );
    }

    #[test]
    fn above_class_never_beats_reference() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let cfg = SolverConfig { n_nodes: 500, max_iters: 150, ..Default::default() };
        let reference = discrete_reference_level(&params, &WEPS, &cfg).unwrap();
        let run = minimize_on_nehari_radial(
            &PotentialSpec::compact_bump(0.3, 2.0),
            &DomainSpec::WholeSpace,
            &params,
            |r| WEPS.eval((r - 8.0).abs()),
            &cfg,
        )
        .unwrap();
        assert!(
            run.energy >= reference - 1e-6,
            "above-class energy {} dipped under reference {}",
            run.energy,
            reference
        );
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let system = RadialSystem::new(
            &PotentialSpec::gaussian(0.2, 1.5),
            &DomainSpec::WholeSpace,
            &params,
            &quick_cfg(),
        )
        .unwrap();
        let u: Vec<f64> = system.grid.iter().map(|&r| WEPS.eval(r)).collect();
        let worst = gradient_check(&system, &u, 20, 42);
        assert!(worst < 1e-5, "worst rel err {worst}");
    }

    #[test]
    fn condition_18_24_three_regimes() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let zs = [[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 5.0, 0.0]];
        // a ≡ 1, whole space: equality at every z
        let flat = check_condition_18_24(
            &PotentialSpec::unit(),
            &DomainSpec::WholeSpace,
            &params,
            &W,
            &zs,
        )
        .unwrap();
        for row in &flat.rows {
            assert!(((row.lhs - flat.rhs) / flat.rhs).abs() < 1e-4, "{:?}", row);
            assert!(((row.ray_level - flat.m) / flat.m).abs() < 1e-4);
        }
        // potential below 1 at the bump: strict satisfaction
        let below = check_condition_18_24(
            &PotentialSpec::gaussian(-0.3, 3.0),
            &DomainSpec::WholeSpace,
            &params,
            &W,
            &[[0.0, 0.0, 0.0]],
        )
        .unwrap();
        assert!(below.rows[0].lhs < below.rhs - 1e-3 * below.rhs);
        assert!(below.all_satisfied());
        // exterior hole, a ≡ 1: cutoff penalty violates the condition
        let hole = check_condition_18_24(
            &PotentialSpec::unit(),
            &DomainSpec::Exterior { hole_radius: 1.0 },
            &params,
            &W,
            &[[6.0, 0.0, 0.0]],
        )
        .unwrap();
        assert!(hole.rows[0].lhs > hole.rhs);
        assert!(!hole.rows[0].satisfied);
    }

    #[test]
    fn nonexistence_sequence_decreases_to_m_eps() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let report = nonexistence_diagnostic(
            &PotentialSpec::unit(),
            &DomainSpec::Exterior { hole_radius: 1.0 },
            &params,
            &WEPS,
            &[4.0, 6.0, 8.0, 10.0],
        )
        .unwrap();
        assert!(report.all_pass(), "{:?}", report.checks);
        let last_gap = report.energies.last().unwrap() - report.m_eps;
        assert!(last_gap > 0.0 && last_gap < 1e-3, "gap {last_gap}");
    }

    #[test]
    fn nonexistence_translation_invariant_case() {
        let params = ProblemParams::new(3, 4.0, 0.05).unwrap();
        let report = nonexistence_diagnostic(
            &PotentialSpec::compact_bump(0.3, 2.0),
            &DomainSpec::WholeSpace,
            &params,
            &WEPS,
            &[4.0, 6.0, 8.0],
        )
        .unwrap();
        assert!(report.all_pass(), "{:?}", report.checks);
        // a ≡ 1 whole space is rejected (nothing breaks translation invariance)
        assert!(nonexistence_diagnostic(
            &PotentialSpec::unit(),
            &DomainSpec::WholeSpace,
            &params,
            &WEPS,
            &[4.0, 6.0],
        )
        .is_err());
    }
}
