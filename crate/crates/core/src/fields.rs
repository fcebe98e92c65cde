//! Finite superpositions of translated (optionally cutoff) radial profiles
//! and their norms on `ℝ^3` by cylindrical quadrature.
//!
//! Norms are assembled from exact radial pieces plus pairwise cross
//! integrals and localized cutoff/potential corrections, so exponentially
//! small differences between nearby configurations are resolved instead of
//! being drowned by the error of a full-domain quadrature.

use crate::nehari::NormBundle;
use crate::potential::PotentialSpec;
use crate::quad::{cylindrical_integral, Frame};
use crate::radial::RadialProfile;
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// The domain: all of `ℝ^3` or the exterior of a ball about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    WholeSpace,
    Exterior { hole_radius: f64 },
}

impl DomainSpec {
    pub fn hole_radius(&self) -> Option<f64> {
        match self {
            DomainSpec::WholeSpace => None,
            DomainSpec::Exterior { hole_radius } => Some(*hole_radius),
        }
    }
}

/// Radial cutoff vanishing on the hole and equal to 1 outside a unit collar,
/// with a quintic smoothstep transition.
#[derive(Debug, Clone, Copy)]
pub struct CutoffSpec {
    pub inner_radius: f64,
    pub transition_width: f64,
}

impl CutoffSpec {
    pub fn for_hole(hole_radius: f64) -> CutoffSpec {
        CutoffSpec { inner_radius: hole_radius, transition_width: 1.0 }
    }

    pub fn value_radial(&self, r: f64) -> f64 {
        let s = (r - self.inner_radius) / self.transition_width;
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
        }
    }

    pub fn deriv_radial(&self, r: f64) -> f64 {
        let s = (r - self.inner_radius) / self.transition_width;
        if s <= 0.0 || s >= 1.0 {
            0.0
        } else {
            30.0 * s * s * (1.0 - s) * (1.0 - s) / self.transition_width
        }
    }

    /// `ϑ(x)` at a point.
    pub fn value(&self, x: [f64; 3]) -> f64 {
        self.value_radial(norm3(x))
    }

    /// Collar outer radius: `ϑ ≡ 1` beyond it.
    pub fn outer_radius(&self) -> f64 {
        self.inner_radius + self.transition_width
    }
}

/// One translated copy of a radial profile with a coefficient.
#[derive(Debug, Clone)]
pub struct BumpTerm {
    pub profile: Arc<RadialProfile>,
    pub center: [f64; 3],
    pub coeff: f64,
}

/// Finite superposition `u(x) = ϑ(x) Σ cᵢ wᵢ(x - zᵢ)`.
#[derive(Debug, Clone)]
pub struct BumpField {
    pub terms: Vec<BumpTerm>,
    pub cutoff: Option<CutoffSpec>,
    pub domain: DomainSpec,
}

#[inline]
fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

#[inline]
fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl BumpField {
    pub fn new(terms: Vec<BumpTerm>, domain: DomainSpec) -> Result<BumpField> {
        if terms.len() > 2 {
            return Err(Error::InvalidParams(
                "at most two bump centers are supported".into(),
            ));
        }
        if let Some(first) = terms.first() {
            for t in &terms {
                if t.profile.params != first.profile.params {
                    return Err(Error::InvalidParams(
                        "all terms must share the same problem parameters".into(),
                    ));
                }
                if t.coeff < 0.0 {
                    return Err(Error::InvalidParams("coefficients must be >= 0".into()));
                }
            }
        }
        let cutoff = domain.hole_radius().map(CutoffSpec::for_hole);
        Ok(BumpField { terms, cutoff, domain })
    }

    pub fn single(profile: Arc<RadialProfile>, center: [f64; 3], domain: DomainSpec) -> Result<BumpField> {
        BumpField::new(vec![BumpTerm { profile, center, coeff: 1.0 }], domain)
    }

    /// Value of the (cutoff) field at `x`.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let mut val = 0.0;
        for t in &self.terms {
            if t.coeff == 0.0 {
                continue;
            }
            val += t.coeff * t.profile.eval(norm3(sub3(x, t.center)));
        }
        match &self.cutoff {
            Some(c) => c.value_radial(norm3(x)) * val,
            None => val,
        }
    }

    /// Value and gradient of the (cutoff) field at `x`.
    pub fn eval_with_grad(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        let mut val = 0.0;
        let mut grad = [0.0; 3];
        for t in &self.terms {
            if t.coeff == 0.0 {
                continue;
            }
            let d = sub3(x, t.center);
            let r = norm3(d);
            val += t.coeff * t.profile.eval(r);
            if r > 1e-12 {
                let du = t.coeff * t.profile.eval_deriv(r) / r;
                grad[0] += du * d[0];
                grad[1] += du * d[1];
                grad[2] += du * d[2];
            }
        }
        match &self.cutoff {
            Some(c) => {
                let rx = norm3(x);
                let th = c.value_radial(rx);
                let dth = c.deriv_radial(rx);
                let g = if rx > 1e-12 {
                    [
                        th * grad[0] + dth * val * x[0] / rx,
                        th * grad[1] + dth * val * x[1] / rx,
                        th * grad[2] + dth * val * x[2] / rx,
                    ]
                } else {
                    [0.0; 3]
                };
                (th * val, g)
            }
            None => (val, grad),
        }
    }

    // value and gradient ignoring the cutoff
    fn eval_with_grad_uncut(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        let bare = BumpField { terms: self.terms.clone(), cutoff: None, domain: DomainSpec::WholeSpace };
        bare.eval_with_grad(x)
    }

    fn tail_radius(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.profile.r_max)
            .fold(0.0, f64::max)
    }

    // frame along the bump axis; n_phi = 1 when everything is axisymmetric
    fn axis_frame(&self, needs_origin: bool) -> (Frame, usize) {
        let frame = match self.terms.len() {
            0 | 1 => {
                let c = self.terms.first().map(|t| t.center).unwrap_or([0.0; 3]);
                let dir = if norm3(c) > 1e-12 { c } else { [1.0, 0.0, 0.0] };
                Frame::along([0.0; 3], dir)
            }
            _ => {
                let z1 = self.terms[0].center;
                let z2 = self.terms[1].center;
                let d = sub3(z2, z1);
                if norm3(d) > 1e-12 {
                    Frame::along(z1, d)
                } else {
                    Frame::along(z1, [1.0, 0.0, 0.0])
                }
            }
        };
        let mut axisym = true;
        if needs_origin {
            // origin must sit on the axis for radial-about-origin factors
            let o = sub3([0.0; 3], frame.origin);
            let t = o[0] * frame.axis[0] + o[1] * frame.axis[1] + o[2] * frame.axis[2];
            let off = [
                o[0] - t * frame.axis[0],
                o[1] - t * frame.axis[1],
                o[2] - t * frame.axis[2],
            ];
            if norm3(off) > 1e-10 {
                axisym = false;
            }
        }
        (frame, if axisym { 1 } else { 24 })
    }

    // axial coordinates of the centers in `frame`
    fn axial_extent(&self, frame: &Frame) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            let d = sub3(t.center, frame.origin);
            let ta = d[0] * frame.axis[0] + d[1] * frame.axis[1] + d[2] * frame.axis[2];
            lo = lo.min(ta);
            hi = hi.max(ta);
        }
        if !lo.is_finite() {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }
}

// distinct radial bundles, computed once per distinct profile
fn radial_bundles(field: &BumpField) -> Result<Vec<NormBundle>> {
    let mut out: Vec<NormBundle> = Vec::new();
    let mut seen: Vec<*const RadialProfile> = Vec::new();
    for t in &field.terms {
        let ptr = Arc::as_ptr(&t.profile);
        if let Some(i) = seen.iter().position(|&p| p == ptr) {
            out.push(out[i]);
            seen.push(ptr);
        } else {
            out.push(t.profile.norm_bundle()?);
            seen.push(ptr);
        }
    }
    Ok(out)
}

/// `∫ u^{e1}(x - z1) u^{e2}(x - z2) dx` for a shared radial profile,
/// reduced to the 2D cylindrical integral about the axis `z1 → z2`.
/// Coincident centers reduce to the radial integral of `u^{e1+e2}`.
pub fn cross_term(
    profile: &RadialProfile,
    exp1: f64,
    exp2: f64,
    z1: [f64; 3],
    z2: [f64; 3],
) -> Result<f64> {
    let d = norm3(sub3(z2, z1));
    if d < 1e-12 {
        let nm1 = profile.params.n as f64 - 1.0;
        let v = crate::quad::adaptive_1d(
            |r| profile.eval(r).powf(exp1 + exp2) * r.powf(nm1),
            0.0,
            profile.r_max,
            1e-9,
        )?;
        return Ok(crate::quad::sphere_area(profile.params.n) * v);
    }
    let frame = Frame::along(z1, sub3(z2, z1));
    let l = profile.r_max;
    let f = |x: [f64; 3]| {
        let r1 = norm3(sub3(x, z1));
        let r2 = norm3(sub3(x, z2));
        profile.eval(r1).powf(exp1) * profile.eval(r2).powf(exp2)
    };
    cylindrical_integral(&f, &frame, -l, d + l, l, 1, 1e-7)
}

/// Cross part of the `H¹` product: `∫(∇w1·∇w2 + w1 w2)` for two translated
/// copies of the same profile.
pub fn cross_h1(profile: &RadialProfile, z1: [f64; 3], z2: [f64; 3]) -> Result<f64> {
    let d = norm3(sub3(z2, z1));
    if d < 1e-12 {
        let b = profile.norm_bundle()?;
        return Ok(b.norm_a_sq);
    }
    let frame = Frame::along(z1, sub3(z2, z1));
    let l = profile.r_max;
    let f = |x: [f64; 3]| {
        let d1 = sub3(x, z1);
        let d2 = sub3(x, z2);
        let r1 = norm3(d1);
        let r2 = norm3(d2);
        if r1 < 1e-12 || r2 < 1e-12 {
            return profile.eval(r1) * profile.eval(r2);
        }
        let cosang = (d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]) / (r1 * r2);
        profile.eval_deriv(r1) * profile.eval_deriv(r2) * cosang
            + profile.eval(r1) * profile.eval(r2)
    };
    cylindrical_integral(&f, &frame, -l, d + l, l, 1, 1e-7)
}

/// The four norm ingredients of a bump field under a radial potential.
pub fn norm_bundle(field: &BumpField, potential: &PotentialSpec) -> Result<NormBundle> {
    let params = match field.terms.first() {
        Some(t) => t.profile.params,
        None => {
            return Ok(NormBundle { norm_a_sq: 0.0, lp_p: 0.0, lcrit: 0.0, l2: 0.0 });
        }
    };
    let p = params.p;
    let crit = params.crit_exp();
    let bundles = radial_bundles(field)?;

    // whole-space, uncut H¹ part by bilinearity
    let mut h1 = 0.0;
    for (t, b) in field.terms.iter().zip(&bundles) {
        h1 += t.coeff * t.coeff * b.norm_a_sq;
    }
    if field.terms.len() == 2 && field.terms[0].coeff != 0.0 && field.terms[1].coeff != 0.0 {
        let cross = cross_h1(
            &field.terms[0].profile,
            field.terms[0].center,
            field.terms[1].center,
        )?;
        h1 += 2.0 * field.terms[0].coeff * field.terms[1].coeff * cross;
    }

    // Lebesgue powers of the uncut field
    let active: usize = field.terms.iter().filter(|t| t.coeff != 0.0).count();
    let (mut lp_p, mut lcrit, mut l2) = (0.0, 0.0, 0.0);
    if active <= 1 {
        for (t, b) in field.terms.iter().zip(&bundles) {
            lp_p += t.coeff.powf(p) * b.lp_p;
            lcrit += t.coeff.powf(crit) * b.lcrit;
            l2 += t.coeff * t.coeff * b.l2;
        }
    } else {
        let (frame, _) = field.axis_frame(false);
        let (alo, ahi) = field.axial_extent(&frame);
        let l = field.tail_radius();
        let bare = BumpField { terms: field.terms.clone(), cutoff: None, domain: DomainSpec::WholeSpace };
        for (q, slot) in [(p, &mut lp_p), (crit, &mut lcrit), (2.0, &mut l2)] {
            let f = |x: [f64; 3]| bare.eval(x).powf(q);
            *slot = cylindrical_integral(&f, &frame, alo - l, ahi + l, l, 1, 1e-7)?;
        }
    }

    // localized cutoff corrections
    if let Some(cut) = &field.cutoff {
        let rc = cut.outer_radius();
        let (frame, n_phi) = field.axis_frame(true);
        let origin_frame = Frame { origin: [0.0; 3], ..frame };
        let h1_corr = {
            let f = |x: [f64; 3]| {
                if norm3(x) > rc {
                    return 0.0;
                }
                let (v, g) = field.eval_with_grad(x);
                let (vu, gu) = field.eval_with_grad_uncut(x);
                (g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + v * v)
                    - (gu[0] * gu[0] + gu[1] * gu[1] + gu[2] * gu[2] + vu * vu)
            };
            cylindrical_integral(&f, &origin_frame, -rc, rc, rc, n_phi, 1e-8)?
        };
        h1 += h1_corr;
        for (q, slot) in [(p, &mut lp_p), (crit, &mut lcrit), (2.0, &mut l2)] {
            let f = |x: [f64; 3]| {
                let r = norm3(x);
                if r > rc {
                    return 0.0;
                }
                let th = cut.value_radial(r);
                let bare = BumpField {
                    terms: field.terms.clone(),
                    cutoff: None,
                    domain: DomainSpec::WholeSpace,
                };
                (th.powf(q) - 1.0) * bare.eval(x).powf(q)
            };
            *slot += cylindrical_integral(&f, &origin_frame, -rc, rc, rc, n_phi, 1e-8)?;
        }
    }

    // localized potential deviation ∫(a - 1)(ϑu)²
    if !potential.is_unit() {
        let rs = potential.support_radius();
        let (frame, n_phi) = field.axis_frame(true);
        let origin_frame = Frame { origin: [0.0; 3], ..frame };
        let f = |x: [f64; 3]| {
            let r = norm3(x);
            if r > rs {
                return 0.0;
            }
            let v = field.eval(x);
            potential.deviation(r) * v * v
        };
        h1 += cylindrical_integral(&f, &origin_frame, -rs, rs, rs, n_phi, 1e-8)?;
    }

    Ok(NormBundle { norm_a_sq: h1, lp_p, lcrit, l2 })
}

/// `∫(|∇u|² + a(x)u²)` of the field.
pub fn norm_a_squared(field: &BumpField, potential: &PotentialSpec) -> Result<f64> {
    Ok(norm_bundle(field, potential)?.norm_a_sq)
}

/// `|u|_q` for `q ∈ {2, p, 2*}`.
pub fn lebesgue_norm(field: &BumpField, q: f64) -> Result<f64> {
    let b = norm_bundle(field, &PotentialSpec::unit())?;
    let params = field.terms.first().map(|t| t.profile.params);
    let pow = match params {
        None => return Ok(0.0),
        Some(pp) => {
            if (q - 2.0).abs() < 1e-12 {
                b.l2
            } else if (q - pp.p).abs() < 1e-12 {
                b.lp_p
            } else if (q - pp.crit_exp()).abs() < 1e-12 {
                b.lcrit
            } else {
                return Err(Error::InvalidParams(format!(
                    "q = {q} not one of 2, p, 2*"
                )));
            }
        }
    };
    Ok(pow.powf(1.0 / q))
}

impl BumpField {
    /// Text manifest: one row per term plus domain/cutoff parameters.
    pub fn write_manifest(&self, path: &Path, profile_files: &[String]) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        match self.domain {
            DomainSpec::WholeSpace => writeln!(f, "domain=whole-space")?,
            DomainSpec::Exterior { hole_radius } => {
                writeln!(f, "domain=exterior")?;
                writeln!(f, "hole_radius={hole_radius:.17e}")?;
            }
        }
        if let Some(c) = &self.cutoff {
            writeln!(f, "cutoff_inner={:.17e}", c.inner_radius)?;
            writeln!(f, "cutoff_width={:.17e}", c.transition_width)?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            let file = profile_files.get(i).cloned().unwrap_or_else(|| format!("profile_{i}.csv"));
            writeln!(
                f,
                "term={file},{:.17e},{:.17e},{:.17e},{:.17e}",
                t.center[0], t.center[1], t.center[2], t.coeff
            )?;
        }
        Ok(())
    }
}
