//! One runner per subcommand. Every number in the artifacts comes from a
//! core-library call; runners only select inputs, write files and grade.

use crate::config::ExperimentConfig;
use crate::Command;
use nehari_core::fields::{BumpField, DomainSpec};
use nehari_core::params::ProblemParams;
use nehari_core::radial::{extract_decay_constants, shoot_ground_state, RadialProfile};
use nehari_core::report::Check;
use nehari_core::Result;
use nehari_core::{interaction, levels, minmax, nehari, solver};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

pub struct Outcome {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

pub fn label(cmd: Command) -> &'static str {
    match cmd {
        Command::GroundState => "ground-state",
        Command::Decay => "decay",
        Command::Sobolev => "sobolev",
        Command::Levels => "levels",
        Command::Interaction => "interaction",
        Command::TwoBump => "two-bump",
        Command::Scan => "scan",
        Command::Barycenter => "barycenter",
        Command::BetaZero => "beta-zero",
        Command::Chain => "chain",
        Command::Check1824 => "check-18-24",
        Command::Nonexistence => "nonexistence",
        Command::All => "all",
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    match cmd {
        Command::GroundState => ground_state(cfg, out),
        Command::Decay => decay(cfg, out),
        Command::Sobolev => sobolev(cfg, out),
        Command::Levels => run_levels(cfg, out),
        Command::Interaction => run_interaction(cfg, out),
        Command::TwoBump => two_bump(cfg, out),
        Command::Scan => scan(cfg, out),
        Command::Barycenter => barycenter(cfg, out),
        Command::BetaZero => beta_zero(cfg, out),
        Command::Chain => chain(cfg, out),
        Command::Check1824 => check_18_24(cfg, out),
        Command::Nonexistence => nonexistence(cfg, out),
        Command::All => unreachable!("expanded in main"),
    }
}

fn shoot(cfg: &ExperimentConfig, params: &ProblemParams) -> Result<Arc<RadialProfile>> {
    Ok(Arc::new(shoot_ground_state(params, &cfg.shoot)?))
}

fn limit_params(cfg: &ExperimentConfig) -> Result<ProblemParams> {
    ProblemParams::new(cfg.params.n, cfg.params.p, 0.0)
}

fn write_report(path: &Path, lines: &[String]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    for line in lines {
        writeln!(f, "{line}")?;
    }
    Ok(())
}

fn ground_state(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let params = cfg.params;
    let profile = shoot(cfg, &params)?;
    profile.write_csv(&out.join("ground_state.csv"))?;
    let bundle = profile.norm_bundle()?;
    let energy = nehari::energy(&bundle, &params);
    let crit = params.crit_exp();
    // on the constraint set: E = (1/2 - 1/p)‖w‖² + ε(1/p - 1/2*)|w|_{2*}^{2*}
    let identity = (0.5 - 1.0 / params.p) * bundle.norm_a_sq
        + params.eps * (1.0 / params.p - 1.0 / crit) * bundle.lcrit;
    let refined = shoot_ground_state(&params, &cfg.shoot.refined())?;
    let refined_energy = nehari::energy(&refined.norm_bundle()?, &params);

    let mut checks = vec![
        Check::less_eq(
            "nehari_residual",
            nehari::residual(&bundle, &params, 1.0).abs(),
            1e-6 * bundle.norm_a_sq,
            0.0,
        ),
        Check::close("energy_identity", energy, identity, 1e-5),
        Check::close("grid_stability", refined_energy, energy, 1e-5),
    ];
    // cross-validate the shot state against the finite-element minimizer
    let run = solver::minimize_on_nehari_radial(
        &cfg.potential,
        &cfg.domain,
        &params,
        |r| profile.eval(r),
        &cfg.solver,
    )?;
    run.write_log_csv(&out.join("ground_state_solver.csv"))?;
    let monotone = run.log.windows(2).all(|w| w[1].energy <= w[0].energy + 1e-12 * energy.abs());
    checks.push(Check::less_eq("fem_descent_monotone", if monotone { 0.0 } else { 1.0 }, 0.0, 0.0));
    if cfg.potential.is_unit() && matches!(cfg.domain, DomainSpec::WholeSpace) {
        checks.push(Check::close("fem_cross_check", run.energy, energy, 1e-2));
    }
    let mut warnings = Vec::new();
    let ode = profile.ode_residual();
    if ode > 1e-2 {
        warnings.push(format!("ODE residual {ode:.3e} above 1e-2"));
    }
    write_report(
        &out.join("ground_state.txt"),
        &[
            format!("n = {}  p = {}  eps = {}", params.n, params.p, params.eps),
            format!("energy = {energy:.12}"),
            format!("norm_sq = {:.12}  lp_p = {:.12}  lcrit = {:.12}", bundle.norm_a_sq, bundle.lp_p, bundle.lcrit),
            format!("ode_residual = {ode:.3e}"),
        ],
    )?;
    Ok(Outcome { checks, warnings })
}

fn decay(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let profile = shoot(cfg, &cfg.params)?;
    let (c, c_prime) = extract_decay_constants(&profile)?;
    let nm1_half = (cfg.params.n as f64 - 1.0) / 2.0;
    // scaled tail w(r) e^r r^{(N-1)/2} should plateau at c
    let window: Vec<f64> = (0..=40).map(|i| 12.0 + 0.25 * i as f64).collect();
    let scaled: Vec<f64> =
        window.iter().map(|&r| profile.eval(r) * r.exp() * r.powf(nm1_half)).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut f = std::fs::File::create(out.join("decay.csv"))?;
    writeln!(f, "r,w,scaled")?;
    for (&r, &s) in window.iter().zip(&scaled) {
        writeln!(f, "{r},{:.17e},{s:.17e}", profile.eval(r))?;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let drift = (hi - lo) / (0.5 * (hi + lo));
    let checks = vec![
        Check::less("plateau_drift<2%", drift, 0.02),
        Check::close("c_prime_matches_c", -c_prime, c, 0.02),
        Check::close("plateau_matches_c", 0.5 * (hi + lo), c, 0.02),
    ];
    write_report(
        &out.join("decay.txt"),
        &[format!("c = {c:.8}"), format!("c_prime = {c_prime:.8}"), format!("drift = {drift:.3e}")],
    )?;
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn sobolev(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let n = cfg.params.n;
    let s = levels::sobolev_constant(n)?;
    let bubble = levels::bubble_profile(n, 1.0);
    let rq = levels::rayleigh_quotient_radial(n, |r| bubble.eval(r), |r| bubble.eval_deriv(r))?;
    let (direct, via) = levels::critical_level_routes(n, cfg.params.eps)?;
    let checks = vec![
        Check::close("bubble_attains_s", rq, s, 1e-4),
        Check::close("critical_level_routes", via, direct, 1e-8),
    ];
    write_report(
        &out.join("sobolev.txt"),
        &[
            format!("n = {n}"),
            format!("sobolev_constant = {s:.12}"),
            format!("bubble_rayleigh_quotient = {rq:.12}"),
            format!("critical_level(eps={}) = {direct:.12}", cfg.params.eps),
        ],
    )?;
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn run_levels(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let ledger =
        levels::verify_level_ordering(cfg.params.n, cfg.params.p, &cfg.eps_list, &cfg.shoot)?;
    ledger.write_csv(&out.join("levels.csv"))?;
    ledger.write_text(&out.join("levels.txt"), "energy level ordering")?;
    Ok(Outcome { checks: ledger.checks.clone(), warnings: Vec::new() })
}

fn run_interaction(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let w = shoot(cfg, &limit_params(cfg)?)?;
    let report = interaction::estimate_c1(&w, &cfg.interaction_rho_list)?;
    let target = interaction::c1_oracle(&w)?;
    report.write_csv(&out.join("interaction.csv"), target)?;
    let checks = vec![
        Check::less("plateau_drift<5%", report.plateau_drift, 0.05),
        Check::close("c1_matches_oracle", report.c1_estimate, target, 0.03),
        Check::less("gamma_half<0", report.gamma_half, 0.0),
    ];
    let mut warnings = Vec::new();
    if report.plateau_drift > 0.025 {
        warnings.push(format!(
            "plateau drift {:.3e} above half the tolerance; consider larger rho",
            report.plateau_drift
        ));
    }
    write_report(
        &out.join("interaction.txt"),
        &[
            format!("c1_estimate = {:.8}", report.c1_estimate),
            format!("c1_oracle = {target:.8}"),
            format!("plateau_drift = {:.3e}", report.plateau_drift),
            format!("gamma(1/2) = {:.8}", report.gamma_half),
        ],
    )?;
    Ok(Outcome { checks, warnings })
}

fn two_bump(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let w = shoot(cfg, &limit_params(cfg)?)?;
    let c1 = interaction::c1_oracle(&w)?;
    let report = interaction::two_bump_expansion_check(
        &w,
        cfg.two_bump_rho,
        &cfg.two_bump_s_list,
        c1,
        cfg.two_bump_lo_mult,
        cfg.two_bump_hi_mult,
    )?;
    report.write_csv(&out.join("two_bump.csv"))?;
    let slack = c1 * report.delta;
    let mut checks = Vec::new();
    for row in &report.rows {
        checks.push(Check::less_eq(
            &format!("norm_lower_s={}", row.s),
            row.norm_main - cfg.two_bump_lo_mult * slack,
            row.norm_sq,
            0.0,
        ));
        checks.push(Check::less_eq(
            &format!("norm_upper_s={}", row.s),
            row.norm_sq,
            row.norm_main + cfg.two_bump_hi_mult * slack,
            0.0,
        ));
        checks.push(Check::less_eq(
            &format!("lp_lower_s={}", row.s),
            row.lp_main - cfg.two_bump_lo_mult * slack,
            row.lp_p,
            0.0,
        ));
        checks.push(Check::less_eq(
            &format!("lp_upper_s={}", row.s),
            row.lp_p,
            row.lp_main + cfg.two_bump_hi_mult * slack,
            0.0,
        ));
    }
    let base = w.norm_bundle()?;
    let gamma = interaction::gamma_function(
        0.5,
        c1,
        base.lp_p.powf(1.0 / cfg.params.p),
        cfg.params.p,
    );
    checks.push(Check::less("gamma_half<0", gamma, 0.0));
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn scan_sigma(cfg: &ExperimentConfig) -> Vec<minmax::SigmaPoint> {
    minmax::sigma_grid(cfg.scan_n_azimuth, cfg.scan_n_polar)
}

fn bary_cfg(cfg: &ExperimentConfig) -> minmax::BarycenterConfig {
    minmax::BarycenterConfig { spacing: cfg.bary_spacing, ..Default::default() }
}

fn scan(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let profile = shoot(cfg, &cfg.params)?;
    let result = minmax::scan_levels(
        &profile,
        &cfg.params,
        cfg.scan_rho,
        cfg.scan_s_count,
        &scan_sigma(cfg),
        &cfg.domain,
        &cfg.potential,
        &bary_cfg(cfg),
    )?;
    result.write_csv(&out.join("scan.csv"))?;
    let checks = vec![Check::less_eq("B<=A", result.b_level, result.a_level, 1e-12 * result.a_level)];
    write_report(
        &out.join("scan.txt"),
        &[
            format!("A = {:.12}", result.a_level),
            format!("B = {:.12}", result.b_level),
            format!("points = {}", result.scan.len()),
        ],
    )?;
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn barycenter(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let profile = shoot(cfg, &cfg.params)?;
    let bc = bary_cfg(cfg);
    let mut f = std::fs::File::create(out.join("barycenter.csv"))?;
    writeln!(f, "rho,beta_x,beta_y,beta_z,err,err_over_rho")?;
    let mut checks = Vec::new();
    let mut ratios = Vec::new();
    for &rho in &cfg.bary_rho_list {
        let field = BumpField::single(profile.clone(), [rho, 0.0, 0.0], cfg.domain.clone())?;
        let b = minmax::barycenter_with(&field, &bc)?;
        let err = ((b[0] - rho).powi(2) + b[1].powi(2) + b[2].powi(2)).sqrt();
        writeln!(f, "{rho},{:.17e},{:.17e},{:.17e},{err:.17e},{:.17e}", b[0], b[1], b[2], err / rho)?;
        checks.push(Check::less_eq(
            &format!("localization_rho={rho}"),
            err,
            2.0 * bc.spacing,
            0.0,
        ));
        ratios.push(err / rho);
    }
    if ratios.len() >= 2 {
        checks.push(Check::less(
            "relative_error_shrinks",
            *ratios.last().unwrap(),
            ratios[0].max(f64::MIN_POSITIVE),
        ));
    }
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn beta_zero(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let profile = shoot(cfg, &cfg.params)?;
    let zero = minmax::find_beta_zero(
        &profile,
        &cfg.params,
        cfg.scan_rho,
        &cfg.domain,
        &cfg.potential,
        &bary_cfg(cfg),
    )?;
    let (lo, hi, f_lo, f_hi) = zero.bracket;
    write_report(
        &out.join("beta_zero.txt"),
        &[
            format!("s_star = {:.8}", zero.s_star),
            format!("bracket = [{lo:.8}, {hi:.8}]  beta_x = [{f_lo:.3e}, {f_hi:.3e}]"),
            format!("certificate_energy = {:.12}", zero.certificate_energy),
            format!("precondition_margin = {:.6e}", zero.precondition_margin),
        ],
    )?;
    let checks = vec![
        Check::less("precondition_margin>0", 0.0, zero.precondition_margin),
        Check::less_eq("bracket_width", hi - lo, 1e-3, 1e-12),
    ];
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn chain(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let m = levels::compute_m_eps(&limit_params(cfg)?, &cfg.shoot)?;
    let m_eps = levels::compute_m_eps(&cfg.params, &cfg.shoot)?;
    // the path generator must solve the same (p, eps) problem, otherwise
    // A < 2 m_eps has no margin to come from
    let profile = shoot(cfg, &cfg.params)?;
    let mut checks = vec![Check::less_eq(
        "rho_above_interaction_threshold",
        cfg.scan_rho_min,
        cfg.scan_rho,
        0.0,
    )];
    let (ledger, scan, zero) = minmax::inequality_chain_report(
        &profile,
        &cfg.params,
        m,
        m_eps,
        cfg.scan_rho,
        cfg.scan_s_count,
        &scan_sigma(cfg),
        &cfg.domain,
        &cfg.potential,
        &bary_cfg(cfg),
    )?;
    scan.write_csv(&out.join("chain_scan.csv"))?;
    ledger.write_csv(&out.join("chain.csv"))?;
    ledger.write_text(&out.join("chain.txt"), "min-max level inequality chain")?;
    checks.extend(ledger.checks.iter().cloned());
    let mut warnings = Vec::new();
    if (zero.s_star - 0.5).abs() > 0.05 && cfg.potential.is_unit() {
        warnings.push(format!("beta zero off the symmetric point: s* = {}", zero.s_star));
    }
    Ok(Outcome { checks, warnings })
}

fn check_18_24(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let w = shoot(cfg, &limit_params(cfg)?)?;
    let report = solver::check_condition_18_24(
        &cfg.potential,
        &cfg.domain,
        &cfg.params,
        &w,
        &cfg.condition_z_list,
    )?;
    report.write_csv(&out.join("condition_18_24.csv"))?;
    let checks = report
        .rows
        .iter()
        .map(|r| {
            Check::less_eq(
                &format!("quotient_z=({},{},{})", r.z[0], r.z[1], r.z[2]),
                r.lhs,
                report.rhs,
                report.tol,
            )
        })
        .collect();
    Ok(Outcome { checks, warnings: Vec::new() })
}

fn nonexistence(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    // this construction lives on the exterior domain; fall back to the
    // configured hole radius when the domain section says whole space
    let domain = match cfg.domain {
        DomainSpec::Exterior { hole_radius } => DomainSpec::Exterior { hole_radius },
        DomainSpec::WholeSpace => DomainSpec::Exterior { hole_radius: 1.0 },
    };
    let profile = shoot(cfg, &cfg.params)?;
    let report = solver::nonexistence_diagnostic(
        &cfg.potential,
        &domain,
        &cfg.params,
        &profile,
        &cfg.nonexistence_n_list,
    )?;
    report.write_csv(&out.join("nonexistence.csv"))?;
    let mut checks = report.checks.clone();
    if let (Some(&last), Some(&first)) = (report.energies.last(), report.energies.first()) {
        let _ = first;
        checks.push(Check::less("final_gap<1e-3", last - report.m_eps, 1e-3));
    }
    Ok(Outcome { checks, warnings: Vec::new() })
}
