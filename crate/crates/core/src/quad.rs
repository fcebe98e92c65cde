//! Gauss-Legendre quadrature: 1D adaptive panels and the cylindrical
//! tensor-product scheme used for two-center integrals on `ℝ^3`.

use crate::{Error, Result};
use once_cell::sync::Lazy;
use rayon::prelude::*;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static GL12: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(12));

/// Fixed 12-point rule mapped to [a, b].
fn panel_gl12(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = (&GL12.0, &GL12.1);
    let mid = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + h * x);
    }
    sum * h
}

/// Adaptive composite Gauss-Legendre on [a, b]: panel count doubles until
/// the relative change is below `tol` (or the refinement cap is hit).
pub fn adaptive_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let f: &dyn Fn(f64) -> f64 = &f;
    let mut n_panels = 4usize;
    let mut prev = composite(f, a, b, n_panels);
    let mut change = f64::INFINITY;
    for level in 0..9 {
        n_panels *= 2;
        let cur = composite(f, a, b, n_panels);
        change = (cur - prev).abs() / cur.abs().max(1e-300);
        if change < tol || (cur - prev).abs() < 1e-300 {
            return Ok(cur);
        }
        prev = cur;
        if level == 8 {
            break;
        }
    }
    if change < 1e-4 {
        return Ok(prev);
    }
    Err(Error::QuadratureNotConverged { change, levels: 9 })
}

fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n_panels: usize) -> f64 {
    let h = (b - a) / n_panels as f64;
    (0..n_panels)
        .map(|i| panel_gl12(f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Surface measure of the unit sphere in `ℝ^N`, `ω_{N-1} = 2 π^{N/2} / Γ(N/2)`.
pub fn sphere_area(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma_half(n)
}

// Γ(N/2) for integer N via the half-integer recursion.
fn gamma_half(n: u32) -> f64 {
    let mut val = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < n as f64 {
        val *= x;
        x += 1.0;
    }
    val
}

/// Orthonormal frame for cylindrical coordinates about an axis.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub origin: [f64; 3],
    pub axis: [f64; 3],
    pub perp1: [f64; 3],
    pub perp2: [f64; 3],
}

impl Frame {
    pub fn along(origin: [f64; 3], direction: [f64; 3]) -> Frame {
        let norm = (direction[0].powi(2) + direction[1].powi(2) + direction[2].powi(2)).sqrt();
        let axis = if norm > 0.0 {
            [direction[0] / norm, direction[1] / norm, direction[2] / norm]
        } else {
            [1.0, 0.0, 0.0]
        };
        // pick the coordinate direction least aligned with the axis
        let trial = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let dot = trial[0] * axis[0] + trial[1] * axis[1] + trial[2] * axis[2];
        let mut p1 = [trial[0] - dot * axis[0], trial[1] - dot * axis[1], trial[2] - dot * axis[2]];
        let n1 = (p1[0] * p1[0] + p1[1] * p1[1] + p1[2] * p1[2]).sqrt();
        p1 = [p1[0] / n1, p1[1] / n1, p1[2] / n1];
        let p2 = [
            axis[1] * p1[2] - axis[2] * p1[1],
            axis[2] * p1[0] - axis[0] * p1[2],
            axis[0] * p1[1] - axis[1] * p1[0],
        ];
        Frame { origin, axis, perp1: p1, perp2: p2 }
    }

    pub fn point(&self, t: f64, xi: f64, phi: f64) -> [f64; 3] {
        let (s, c) = phi.sin_cos();
        [
            self.origin[0] + t * self.axis[0] + xi * (c * self.perp1[0] + s * self.perp2[0]),
            self.origin[1] + t * self.axis[1] + xi * (c * self.perp1[1] + s * self.perp2[1]),
            self.origin[2] + t * self.axis[2] + xi * (c * self.perp1[2] + s * self.perp2[2]),
        ]
    }
}

/// Cylindrical integral `∫ f(x) dx` over the slab `t ∈ [t0, t1], ξ ∈ [0, xi_max]`
/// about `frame`. `n_phi = 1` means the integrand is axially symmetric and the
/// angular factor 2π is applied; otherwise `n_phi` uniform angles are averaged.
///
/// Panels double in both in-plane directions until the relative change drops
/// below `tol`; errors out if the last two levels still disagree by > 1e-4.
pub fn cylindrical_integral<F>(
    f: &F,
    frame: &Frame,
    t0: f64,
    t1: f64,
    xi_max: f64,
    n_phi: usize,
    tol: f64,
) -> Result<f64>
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    let mut nt = (((t1 - t0) / 2.0).ceil() as usize).max(4);
    let mut nxi = ((xi_max / 2.0).ceil() as usize).max(3);
    let mut prev = cyl_level(f, frame, t0, t1, xi_max, n_phi, nt, nxi);
    let mut change = f64::INFINITY;
    for level in 0..4 {
        nt *= 2;
        nxi *= 2;
        let cur = cyl_level(f, frame, t0, t1, xi_max, n_phi, nt, nxi);
        change = (cur - prev).abs() / cur.abs().max(1e-300);
        if change < tol || (cur - prev).abs() < 1e-300 {
            return Ok(cur);
        }
        prev = cur;
        let _ = level;
    }
    if change < 1e-4 {
        Ok(prev)
    } else {
        Err(Error::QuadratureNotConverged { change, levels: 4 })
    }
}

fn cyl_level<F>(
    f: &F,
    frame: &Frame,
    t0: f64,
    t1: f64,
    xi_max: f64,
    n_phi: usize,
    nt: usize,
    nxi: usize,
) -> f64
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    let (nodes, weights) = (&GL12.0, &GL12.1);
    let ht = (t1 - t0) / nt as f64;
    let hxi = xi_max / nxi as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    (0..nt * nxi)
        .into_par_iter()
        .map(|idx| {
            let it = idx / nxi;
            let ixi = idx % nxi;
            let ta = t0 + it as f64 * ht;
            let xa = ixi as f64 * hxi;
            let mut acc = 0.0;
            for (tn, tw) in nodes.iter().zip(weights) {
                let t = ta + 0.5 * ht * (1.0 + tn);
                for (xn, xw) in nodes.iter().zip(weights) {
                    let xi = xa + 0.5 * hxi * (1.0 + xn);
                    let fv = if n_phi <= 1 {
                        f(frame.point(t, xi, 0.0))
                    } else {
                        let mut s = 0.0;
                        for k in 0..n_phi {
                            s += f(frame.point(t, xi, two_pi * k as f64 / n_phi as f64));
                        }
                        s / n_phi as f64
                    };
                    acc += tw * xw * fv * xi;
                }
            }
            acc * 0.25 * ht * hxi * two_pi
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // 12-point rule is exact through degree 23.
        let (nodes, weights) = gauss_legendre(12);
        let val: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x.powi(22)).sum();
        assert!((val - 2.0 / 23.0).abs() < 1e-13, "{val}");
    }

    #[test]
    fn adaptive_1d_exponential() {
        let v = adaptive_1d(|x: f64| (-x).exp(), 0.0, 30.0, 1e-10).unwrap();
        assert!((v - (1.0 - (-30.0f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((sphere_area(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn cylindrical_gaussian() {
        // ∫ e^{-|x|^2} dx = π^{3/2}
        let frame = Frame::along([0.0; 3], [1.0, 0.0, 0.0]);
        let f = |x: [f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        let v = cylindrical_integral(&f, &frame, -8.0, 8.0, 8.0, 1, 1e-8).unwrap();
        assert!((v - std::f64::consts::PI.powf(1.5)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn cylindrical_off_axis_matches_axisymmetric() {
        // Gaussian centered off the integration axis: needs the phi average.
        let frame = Frame::along([0.0; 3], [0.0, 0.0, 1.0]);
        let c = [1.3, -0.4, 0.2];
        let f = |x: [f64; 3]| {
            let d = [(x[0] - c[0]), (x[1] - c[1]), (x[2] - c[2])];
            (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])).exp()
        };
        let v = cylindrical_integral(&f, &frame, -9.0, 9.0, 9.0, 24, 1e-8).unwrap();
        assert!((v - std::f64::consts::PI.powf(1.5)).abs() < 1e-6, "{v}");
    }
}
