#!/usr/bin/env python3
"""Smoke test for the nehari_py extension module.

Builds nothing itself: expects `cargo build --release -p nehari-py` to have
produced target/release/libnehari_py.so (or .dylib/.dll). Copies it next to
this script under the importable name and runs a few numeric checks.
"""

import math
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_extension():
    candidates = [
        ROOT / "target" / "release" / "libnehari_py.so",
        ROOT / "target" / "release" / "libnehari_py.dylib",
        ROOT / "target" / "release" / "nehari_py.dll",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("nehari_py extension not found; run `cargo build --release -p nehari-py` first")


def import_module():
    src = locate_extension()
    suffix = ".pyd" if src.suffix == ".dll" else ".so"
    dst = Path(__file__).resolve().parent / f"nehari_py{suffix}"
    if not dst.exists() or src.stat().st_mtime > dst.stat().st_mtime:
        shutil.copyfile(src, dst)
    sys.path.insert(0, str(dst.parent))
    import nehari_py

    return nehari_py


def check(name, ok, detail=""):
    tag = "pass" if ok else "FAIL"
    print(f"[{tag}] {name}" + (f": {detail}" if detail else ""))
    return ok


def main():
    nh = import_module()
    ok = True

    # closed form: S_N = N(N-2) pi (Gamma(N/2)/Gamma(N))^(2/N)
    s3 = nh.sobolev_constant(3)
    exact = 3.0 * 1.0 * math.pi * (math.gamma(1.5) / math.gamma(3.0)) ** (2.0 / 3.0)
    ok &= check("sobolev_constant", abs(s3 - exact) < 1e-8 * exact, f"{s3:.10f}")

    w = nh.shoot(3, 4.0, 0.0, rk_step=4e-3, n_nodes=2000)
    energy = w.energy()
    norm_sq, lp_p, lcrit, _ = w.norms()
    ok &= check("nehari_identity", abs(norm_sq - lp_p) < 1e-6 * norm_sq)
    ok &= check("energy_identity", abs(energy - 0.25 * norm_sq) < 1e-6 * energy)
    c, c_prime = w.decay_constants()
    ok &= check("decay_constants", abs(c_prime + c) < 0.02 * c, f"c={c:.5f}")

    m = energy
    m_eps = nh.ground_state_level(3, 4.0, 0.05)
    crit = nh.critical_level(3, 0.05)
    ok &= check("level_ordering", m_eps < m < 2.0 * m_eps and m_eps < crit,
                f"m_eps={m_eps:.5f} m={m:.5f} crit={crit:.5f}")

    c1 = nh.interaction_constant(w)
    normalized = nh.normalized_cross_integrals(w, [4.0, 5.0, 6.0])
    ok &= check("interaction_plateau",
                all(abs(v - c1) < 0.03 * c1 for v in normalized), f"c1={c1:.5f}")
    gamma = nh.gamma_coefficient(0.5, c1, lp_p ** 0.25, 4.0)
    ok &= check("gamma_half_negative", gamma < 0.0, f"{gamma:.5f}")

    beta = nh.barycenter(w, [[5.0, 0.0, 0.0]], [1.0])
    err = math.dist(beta, [5.0, 0.0, 0.0])
    ok &= check("barycenter_localization", err < 0.5, f"err={err:.2e}")

    weps = nh.shoot(3, 4.0, 0.05, rk_step=4e-3, n_nodes=2000)
    a, b = nh.scan_levels(weps, 6.0, s_count=5, n_azimuth=4, n_polar=2)
    ok &= check("scan_levels", m < a < 2.0 * m_eps and b < a,
                f"A={a:.5f} B={b:.5f}")
    s_star, certificate = nh.beta_zero(weps, 6.0)
    ok &= check("beta_zero", abs(s_star - 0.5) < 1e-2 and b < certificate <= a * (1 + 1e-10),
                f"s*={s_star:.4f} C={certificate:.5f}")

    fem_energy, grad_norm, converged = nh.minimize_radial(weps)
    ok &= check("fem_minimizer", converged and abs(fem_energy - m_eps) < 1e-2 * m_eps,
                f"E={fem_energy:.5f} |g|={grad_norm:.2e}")

    print("RESULT:", "PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
