//! Sectioned key=value config files. The built-in defaults are always
//! parsed first; a user file overrides individual keys.

use nehari_core::fields::DomainSpec;
use nehari_core::params::ProblemParams;
use nehari_core::potential::PotentialSpec;
use nehari_core::radial::ShootConfig;
use nehari_core::solver::SolverConfig;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

const DEFAULTS: &str = include_str!("../../../configs/defaults.cfg");

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Keys = BTreeMap<(String, String), String>;

fn parse_into(text: &str, source: &str, keys: &mut Keys) -> Result<(), ConfigError> {
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "{source}:{}: expected `key = value` or `[section]`, got `{line}`",
                lineno + 1
            )));
        };
        if section.is_empty() {
            return Err(ConfigError(format!(
                "{source}:{}: key `{}` outside any [section]",
                lineno + 1,
                k.trim()
            )));
        }
        keys.insert((section.clone(), k.trim().to_string()), v.trim().to_string());
    }
    Ok(())
}

struct Raw {
    keys: Keys,
}

impl Raw {
    fn get(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.keys
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
            .ok_or_else(|| ConfigError(format!("{section}.{key}: missing")))
    }

    fn f64(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        let v = self.get(section, key)?;
        v.parse()
            .map_err(|_| ConfigError(format!("{section}.{key}: `{v}` is not a number")))
    }

    fn usize(&self, section: &str, key: &str) -> Result<usize, ConfigError> {
        let v = self.get(section, key)?;
        v.parse()
            .map_err(|_| ConfigError(format!("{section}.{key}: `{v}` is not an integer")))
    }

    fn f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v = self.get(section, key)?;
        v.split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| {
                    ConfigError(format!("{section}.{key}: `{}` is not a number", s.trim()))
                })
            })
            .collect()
    }

    fn points(&self, section: &str, key: &str) -> Result<Vec<[f64; 3]>, ConfigError> {
        let v = self.get(section, key)?;
        v.split(';')
            .map(|triple| {
                let parts: Vec<&str> = triple.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(ConfigError(format!(
                        "{section}.{key}: `{}` is not three coordinates",
                        triple.trim()
                    )));
                }
                let mut z = [0.0; 3];
                for (i, p) in parts.iter().enumerate() {
                    z[i] = p.parse().map_err(|_| {
                        ConfigError(format!("{section}.{key}: `{p}` is not a number"))
                    })?;
                }
                Ok(z)
            })
            .collect()
    }
}

pub struct ExperimentConfig {
    pub params: ProblemParams,
    pub potential: PotentialSpec,
    pub domain: DomainSpec,
    pub shoot: ShootConfig,
    pub solver: SolverConfig,
    pub eps_list: Vec<f64>,
    pub interaction_rho_list: Vec<f64>,
    pub two_bump_rho: f64,
    pub two_bump_s_list: Vec<f64>,
    pub two_bump_lo_mult: f64,
    pub two_bump_hi_mult: f64,
    pub scan_rho: f64,
    pub scan_rho_min: f64,
    pub scan_s_count: usize,
    pub scan_n_azimuth: usize,
    pub scan_n_polar: usize,
    pub bary_spacing: f64,
    pub bary_rho_list: Vec<f64>,
    pub condition_z_list: Vec<[f64; 3]>,
    pub nonexistence_n_list: Vec<f64>,
}

impl ExperimentConfig {
    pub fn load(user: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
        let mut keys = Keys::new();
        parse_into(DEFAULTS, "defaults", &mut keys)?;
        if let Some(path) = user {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            parse_into(&text, &path.display().to_string(), &mut keys)?;
        }
        let raw = Raw { keys };

        let n = raw.usize("problem", "n")? as u32;
        let params = ProblemParams::new(n, raw.f64("problem", "p")?, raw.f64("problem", "eps")?)
            .map_err(|e| ConfigError(format!("problem: {e}")))?;

        let potential = match raw.get("potential", "kind")? {
            "unit" => PotentialSpec::unit(),
            "gaussian" => {
                PotentialSpec::gaussian(raw.f64("potential", "amp")?, raw.f64("potential", "width")?)
            }
            "bump" => PotentialSpec::compact_bump(
                raw.f64("potential", "amp")?,
                raw.f64("potential", "radius")?,
            ),
            other => {
                return Err(ConfigError(format!(
                    "potential.kind: `{other}` is not unit | gaussian | bump"
                )))
            }
        };

        let domain = match raw.get("domain", "kind")? {
            "whole" => DomainSpec::WholeSpace,
            "exterior" => {
                let r = raw.f64("domain", "hole_radius")?;
                if r <= 0.0 {
                    return Err(ConfigError(format!(
                        "domain.hole_radius: {r} must be positive"
                    )));
                }
                DomainSpec::Exterior { hole_radius: r }
            }
            other => {
                return Err(ConfigError(format!(
                    "domain.kind: `{other}` is not whole | exterior"
                )))
            }
        };

        let shoot = ShootConfig {
            r_max: raw.f64("shoot", "r_max")?,
            rk_step: raw.f64("shoot", "rk_step")?,
            n_nodes: raw.usize("shoot", "n_nodes")?,
            ..Default::default()
        };
        let solver = SolverConfig {
            n_nodes: raw.usize("solver", "n_nodes")?,
            r_max: raw.f64("solver", "r_max")?,
            max_iters: raw.usize("solver", "max_iters")?,
            grad_tol: raw.f64("solver", "grad_tol")?,
        };

        let cfg = ExperimentConfig {
            params,
            potential,
            domain,
            shoot,
            solver,
            eps_list: raw.f64_list("levels", "eps_list")?,
            interaction_rho_list: raw.f64_list("interaction", "rho_list")?,
            two_bump_rho: raw.f64("two_bump", "rho")?,
            two_bump_s_list: raw.f64_list("two_bump", "s_list")?,
            two_bump_lo_mult: raw.f64("two_bump", "lo_mult")?,
            two_bump_hi_mult: raw.f64("two_bump", "hi_mult")?,
            scan_rho: raw.f64("scan", "rho")?,
            scan_rho_min: raw.f64("scan", "rho_min")?,
            scan_s_count: raw.usize("scan", "s_count")?,
            scan_n_azimuth: raw.usize("scan", "n_azimuth")?,
            scan_n_polar: raw.usize("scan", "n_polar")?,
            bary_spacing: raw.f64("barycenter", "spacing")?,
            bary_rho_list: raw.f64_list("barycenter", "rho_list")?,
            condition_z_list: raw.points("condition", "z_list")?,
            nonexistence_n_list: raw.f64_list("nonexistence", "n_list")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.shoot.r_max <= 0.0 || self.shoot.rk_step <= 0.0 {
            return Err(ConfigError("shoot: r_max and rk_step must be positive".into()));
        }
        if self.scan_s_count < 2 {
            return Err(ConfigError(format!(
                "scan.s_count: {} must be at least 2",
                self.scan_s_count
            )));
        }
        if self.scan_rho <= 0.0 {
            return Err(ConfigError(format!("scan.rho: {} must be positive", self.scan_rho)));
        }
        if self.bary_spacing <= 0.0 {
            return Err(ConfigError(format!(
                "barycenter.spacing: {} must be positive",
                self.bary_spacing
            )));
        }
        for list in [&self.eps_list, &self.interaction_rho_list, &self.nonexistence_n_list] {
            if list.is_empty() {
                return Err(ConfigError("list-valued keys must be nonempty".into()));
            }
        }
        Ok(())
    }
}
