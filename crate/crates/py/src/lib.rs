//! Python bindings: radial ground states, energy levels, interaction
//! constants, barycenters and the min-max level scan.

use nehari_core::fields::{BumpField, BumpTerm, DomainSpec};
use nehari_core::params::ProblemParams;
use nehari_core::potential::PotentialSpec;
use nehari_core::radial::{extract_decay_constants, shoot_ground_state, RadialProfile, ShootConfig};
use nehari_core::solver::SolverConfig;
use nehari_core::{interaction, levels, minmax, nehari, solver};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::sync::Arc;

fn err(e: nehari_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_domain(hole_radius: Option<f64>) -> DomainSpec {
    match hole_radius {
        Some(r) => DomainSpec::Exterior { hole_radius: r },
        None => DomainSpec::WholeSpace,
    }
}

fn parse_potential(kind: &str, amp: f64, scale: f64) -> PyResult<PotentialSpec> {
    match kind {
        "unit" => Ok(PotentialSpec::unit()),
        "gaussian" => Ok(PotentialSpec::gaussian(amp, scale)),
        "bump" => Ok(PotentialSpec::compact_bump(amp, scale)),
        other => Err(PyValueError::new_err(format!(
            "potential kind `{other}` is not unit | gaussian | bump"
        ))),
    }
}

/// Radial ground-state profile of `-Δu + u = u^{p-1} + ε u^{2*-1}`.
#[pyclass]
struct Profile {
    inner: Arc<RadialProfile>,
}

#[pymethods]
impl Profile {
    #[getter]
    fn n(&self) -> u32 {
        self.inner.params.n
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.params.p
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.params.eps
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    fn eval(&self, r: f64) -> f64 {
        self.inner.eval(r)
    }

    /// `(‖u‖², |u|_p^p, |u|_{2*}^{2*}, |u|_2²)`.
    fn norms(&self) -> PyResult<(f64, f64, f64, f64)> {
        let b = self.inner.norm_bundle().map_err(err)?;
        Ok((b.norm_a_sq, b.lp_p, b.lcrit, b.l2))
    }

    /// Energy of the profile under its own `(p, ε)` functional.
    fn energy(&self) -> PyResult<f64> {
        let b = self.inner.norm_bundle().map_err(err)?;
        Ok(nehari::energy(&b, &self.inner.params))
    }

    /// Decay constants `(c, c')` of the exponential tail law.
    fn decay_constants(&self) -> PyResult<(f64, f64)> {
        extract_decay_constants(&self.inner).map_err(err)
    }

    fn ode_residual(&self) -> f64 {
        self.inner.ode_residual()
    }
}

/// Shoot the radial ground state.
#[pyfunction]
#[pyo3(signature = (n, p, eps, r_max=35.0, rk_step=2e-3, n_nodes=4000))]
fn shoot(n: u32, p: f64, eps: f64, r_max: f64, rk_step: f64, n_nodes: usize) -> PyResult<Profile> {
    let params = ProblemParams::new(n, p, eps).map_err(err)?;
    let cfg = ShootConfig { r_max, rk_step, n_nodes, ..Default::default() };
    Ok(Profile { inner: Arc::new(shoot_ground_state(&params, &cfg).map_err(err)?) })
}

/// Best Sobolev constant of the embedding `H¹ ⊂ L^{2*}`.
#[pyfunction]
fn sobolev_constant(n: u32) -> PyResult<f64> {
    levels::sobolev_constant(n).map_err(err)
}

/// Ground-state level of the pure critical problem, `(1/N) S^{N/2} ε^{-(N-2)/2}`.
#[pyfunction]
fn critical_level(n: u32, eps: f64) -> PyResult<f64> {
    levels::critical_level(n, eps).map_err(err)
}

/// Ground-state energy level `m_ε` from a fresh shot.
#[pyfunction]
#[pyo3(signature = (n, p, eps, rk_step=4e-3, n_nodes=2000))]
fn ground_state_level(n: u32, p: f64, eps: f64, rk_step: f64, n_nodes: usize) -> PyResult<f64> {
    let params = ProblemParams::new(n, p, eps).map_err(err)?;
    let cfg = ShootConfig { rk_step, n_nodes, ..Default::default() };
    levels::compute_m_eps(&params, &cfg).map_err(err)
}

/// Interaction scale `δ_ρ = (ρ^{(N-1)/2} e^{2ρ})^{-1}` of bumps at
/// mutual distance `2ρ`.
#[pyfunction]
fn delta_rho(rho: f64, n: u32) -> f64 {
    interaction::delta_rho(rho, n)
}

/// Interaction constant `c₁` from its closed-form oracle.
#[pyfunction]
fn interaction_constant(profile: &Profile) -> PyResult<f64> {
    interaction::c1_oracle(&profile.inner).map_err(err)
}

/// `δ_ρ`-normalized cross integrals over a list of separations.
#[pyfunction]
fn normalized_cross_integrals(profile: &Profile, rho_list: Vec<f64>) -> PyResult<Vec<f64>> {
    let report = interaction::estimate_c1(&profile.inner, &rho_list).map_err(err)?;
    Ok(report.normalized)
}

/// Second-order coefficient `γ(s)` of the two-bump energy expansion.
#[pyfunction]
fn gamma_coefficient(s: f64, c1: f64, lp_norm: f64, p: f64) -> f64 {
    interaction::gamma_function(s, c1, lp_norm, p)
}

/// Barycenter of a sum of translated bumps, `β(u) = ∫ x̂ u² / ∫ u²` with
/// the unit-ball-averaged, half-max-thresholded density.
#[pyfunction]
#[pyo3(signature = (profile, centers, coeffs, hole_radius=None))]
fn barycenter(
    profile: &Profile,
    centers: Vec<[f64; 3]>,
    coeffs: Vec<f64>,
    hole_radius: Option<f64>,
) -> PyResult<[f64; 3]> {
    if centers.len() != coeffs.len() {
        return Err(PyValueError::new_err("centers and coeffs must have equal length"));
    }
    let terms = centers
        .into_iter()
        .zip(coeffs)
        .map(|(center, coeff)| BumpTerm { profile: profile.inner.clone(), center, coeff })
        .collect();
    let field = BumpField::new(terms, parse_domain(hole_radius)).map_err(err)?;
    minmax::barycenter(&field).map_err(err)
}

/// Min-max levels `(A, B)` of the two-bump path scan.
#[pyfunction]
#[pyo3(signature = (profile, rho, s_count=11, n_azimuth=8, n_polar=4, hole_radius=None))]
fn scan_levels(
    profile: &Profile,
    rho: f64,
    s_count: usize,
    n_azimuth: usize,
    n_polar: usize,
    hole_radius: Option<f64>,
) -> PyResult<(f64, f64)> {
    let sigma = minmax::sigma_grid(n_azimuth, n_polar);
    let result = minmax::scan_levels(
        &profile.inner,
        &profile.inner.params,
        rho,
        s_count,
        &sigma,
        &parse_domain(hole_radius),
        &PotentialSpec::unit(),
        &minmax::BarycenterConfig::default(),
    )
    .map_err(err)?;
    Ok((result.a_level, result.b_level))
}

/// Path parameter `s*` where the barycenter crosses zero, with the energy
/// certificate `Ĉ` of that candidate.
#[pyfunction]
#[pyo3(signature = (profile, rho, hole_radius=None))]
fn beta_zero(profile: &Profile, rho: f64, hole_radius: Option<f64>) -> PyResult<(f64, f64)> {
    let zero = minmax::find_beta_zero(
        &profile.inner,
        &profile.inner.params,
        rho,
        &parse_domain(hole_radius),
        &PotentialSpec::unit(),
        &minmax::BarycenterConfig::default(),
    )
    .map_err(err)?;
    Ok((zero.s_star, zero.certificate_energy))
}

/// Projected-gradient minimization on the Nehari set of the radial
/// discretization. Returns `(energy, grad_norm, converged)`.
#[pyfunction]
#[pyo3(signature = (profile, potential_kind="unit", amp=0.0, scale=1.0, hole_radius=None, n_nodes=700, max_iters=400))]
fn minimize_radial(
    profile: &Profile,
    potential_kind: &str,
    amp: f64,
    scale: f64,
    hole_radius: Option<f64>,
    n_nodes: usize,
    max_iters: usize,
) -> PyResult<(f64, f64, bool)> {
    let potential = parse_potential(potential_kind, amp, scale)?;
    let cfg = SolverConfig { n_nodes, max_iters, ..Default::default() };
    let inner = profile.inner.clone();
    let run = solver::minimize_on_nehari_radial(
        &potential,
        &parse_domain(hole_radius),
        &inner.params,
        |r| inner.eval(r),
        &cfg,
    )
    .map_err(err)?;
    Ok((run.energy, run.grad_norm, matches!(run.flag, solver::SolveFlag::Converged)))
}

#[pymodule]
fn nehari_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Profile>()?;
    m.add_function(wrap_pyfunction!(shoot, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_constant, m)?)?;
    m.add_function(wrap_pyfunction!(critical_level, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state_level, m)?)?;
    m.add_function(wrap_pyfunction!(delta_rho, m)?)?;
    m.add_function(wrap_pyfunction!(interaction_constant, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_cross_integrals, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(barycenter, m)?)?;
    m.add_function(wrap_pyfunction!(scan_levels, m)?)?;
    m.add_function(wrap_pyfunction!(beta_zero, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_radial, m)?)?;
    Ok(())
}
