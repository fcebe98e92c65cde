//! Radial potentials `a(x) = 1 + perturbation(|x|)` with the sign classes
//! and the weighted-integrability check used by the ground-state criteria.

use crate::quad::{adaptive_1d, sphere_area};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum Perturbation {
    None,
    /// `amp · exp(-r²/(2σ²))`
    Gaussian { amp: f64, width: f64 },
    /// `amp · (1 - (r/radius)²)³` on `r < radius`, zero outside.
    CompactBump { amp: f64, radius: f64 },
    /// linear interpolation of `(r, a(r) - 1)` samples, zero past the last node.
    Tabulated { rs: Vec<f64>, vals: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    /// `a ≤ a_∞` somewhere (hypothesis of the first ground-state criterion)
    Below,
    /// `a ≥ a_∞` (the nonexistence regime)
    Above,
    Mixed,
}

/// Radial potential with normalized limit `a_∞ = 1`.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub perturbation: Perturbation,
}

impl PotentialSpec {
    pub fn unit() -> PotentialSpec {
        PotentialSpec { perturbation: Perturbation::None }
    }

    pub fn gaussian(amp: f64, width: f64) -> PotentialSpec {
        PotentialSpec { perturbation: Perturbation::Gaussian { amp, width } }
    }

    pub fn compact_bump(amp: f64, radius: f64) -> PotentialSpec {
        PotentialSpec { perturbation: Perturbation::CompactBump { amp, radius } }
    }

    /// `a(r) - 1`
    pub fn deviation(&self, r: f64) -> f64 {
        match &self.perturbation {
            Perturbation::None => 0.0,
            Perturbation::Gaussian { amp, width } => {
                amp * (-(r * r) / (2.0 * width * width)).exp()
            }
            Perturbation::CompactBump { amp, radius } => {
                if r < *radius {
                    amp * (1.0 - (r / radius).powi(2)).powi(3)
                } else {
                    0.0
                }
            }
            Perturbation::Tabulated { rs, vals } => {
                if rs.is_empty() || r >= *rs.last().unwrap() {
                    return 0.0;
                }
                if r <= rs[0] {
                    return vals[0];
                }
                let i = rs.partition_point(|&x| x <= r) - 1;
                let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
                vals[i] * (1.0 - t) + vals[i + 1] * t
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        1.0 + self.deviation(r)
    }

    pub fn value_at(&self, x: [f64; 3]) -> f64 {
        self.value((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.perturbation, Perturbation::None)
    }

    /// Radius past which the deviation is numerically negligible.
    pub fn support_radius(&self) -> f64 {
        match &self.perturbation {
            Perturbation::None => 0.0,
            Perturbation::Gaussian { width, .. } => width * (2.0 * 80.0f64).sqrt(),
            Perturbation::CompactBump { radius, .. } => *radius,
            Perturbation::Tabulated { rs, .. } => rs.last().copied().unwrap_or(0.0),
        }
    }

    pub fn sign_class(&self) -> SignClass {
        let mut has_above = false;
        let mut has_below = false;
        let sup = self.support_radius();
        for i in 0..=400 {
            let d = self.deviation(sup * i as f64 / 400.0);
            if d > 1e-14 {
                has_above = true;
            }
            if d < -1e-14 {
                has_below = true;
            }
        }
        match (has_above, has_below) {
            (true, false) => SignClass::Above,
            (false, true) => SignClass::Below,
            _ if has_above => SignClass::Mixed,
            _ => SignClass::Above, // a ≡ 1 counts as the (degenerate) above class
        }
    }

    /// Validates `a(r) ≥ a₀ > 0` on a dense sample, returning `a₀`.
    pub fn floor(&self) -> Result<f64> {
        let sup = self.support_radius().max(1.0);
        let mut a0 = f64::INFINITY;
        for i in 0..=2000 {
            a0 = a0.min(self.value(sup * i as f64 / 2000.0));
        }
        if a0 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "potential dips to {a0:.3e}; a(x) >= a_0 > 0 is required"
            )));
        }
        Ok(a0)
    }

    /// Numeric check of `∫(a-1)|x|^{N-1}e^{2|x|}dx < ∞` on the support
    /// (finite by construction for compactly supported or Gaussian tails;
    /// returns the integral value).
    pub fn weighted_tail_integral(&self, n: u32) -> Result<f64> {
        let sup = self.support_radius();
        if sup == 0.0 {
            return Ok(0.0);
        }
        let nm1 = n as f64 - 1.0;
        let v = adaptive_1d(
            |r| self.deviation(r).abs() * r.powf(nm1) * (2.0 * r).exp(),
            0.0,
            sup,
            1e-8,
        )?;
        Ok(sphere_area(n) * v)
    }
}
