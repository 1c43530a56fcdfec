"""Acceptance criteria 1-11. Each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time

import numpy as np
import pytest

from bethecont import excitations as EX
from bethecont import largephi as LP
from bethecont import moments as MO
from bethecont import pseudovacuum as PV
from bethecont import series as S
from bethecont import solver as SO
from bethecont import trajectory as TR

_capture = None


@pytest.fixture(autouse=True)
def _grab_capture(request):
    global _capture
    _capture = request.config.pluginmanager.getplugin("capturemanager")
    yield
    _capture = None


def report(n: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} | {detail}"
    if _capture is not None:
        with _capture.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)
    assert ok, line


def _pv(a):
    return np.where(np.asarray(a) == 0, -1.0, 0.0) + 0j


# ----------------------------------------------------------------------------


def test_c01_theorem1_rows():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        X = rng.normal(size=8) + 1j * rng.normal(size=8)
        s = LP.expand_coefficients(lambda a: X[np.asarray(a) + 1], 3)
        Xm1, X0, X1, X2 = X[0], X[1], X[2], X[3]
        want = [
            Xm1 / 2,
            X0 + 2 * X0**2 - 2 * X1 * Xm1,
            (0.5 - 2 * X0 - 4 * X0**2) * X1 - 4 * Xm1 * X1**2 + 2 * (1 + 4 * X0) * Xm1 * X2,
        ]
        worst = max(worst, max(abs(s.coeff(b) - w) for b, w in zip((-1, 0, 1), want)))
    dt = time.perf_counter() - t0
    report(1, "large-phi rows b=-1,0,1 at 200 random moment sets", worst <= 1e-12 and dt < 1.0,
           f"max |err| = {worst:.2e} (tol 1e-12), runtime {dt:.2f}s (< 1s)")


FIG_PAIRS = [("standard", 0.25, 200), ("standard", 0.75, 100), ("edge_split", 0.25, 240),
             ("edge_split", 0.5, 144), ("three_block", 0.25, 240), ("three_block", 0.5, 144)]
_MAKE = {"standard": MO.standard, "edge_split": MO.edge_split, "three_block": MO.three_block}


def test_c02_solver_series_agreement():
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    for kind, m, L in FIG_PAIRS:
        f = _MAKE[kind](m)
        s = LP.expand_coefficients(f, 20)
        uc = min(LP.estimate_radius(s), 1.0)
        xs = np.linspace(0.1, 0.9, 17) * uc
        states = SO.solve_twisted(L, MO.bethe_numbers_for(f, L), -0.5 * np.log(xs))
        err = max(abs(LP.evaluate(s, x) - st.energy) for x, st in zip(xs, states))
        worst = max(worst, err)
        parts.append(f"{kind}/{m}/L={L}: {err:.1e}")
    dt = time.perf_counter() - t0
    report(2, "series vs finite-L energy, six figure pairs, inner 80% of window",
           worst <= 1e-2 and dt < 120, f"max diff {worst:.2e} (tol 1e-2), {dt:.1f}s; " + "; ".join(parts))


def test_c03_pseudo_vacuum_exactness():
    s = LP.expand_coefficients(_pv, 20)
    e0 = abs(s.coeff(0) - 1)
    eb = max(abs(s.coeff(b)) for b in range(1, 19))
    report(3, "pseudo-vacuum f_0 = 1 and f_b = 0 for 1 <= b <= 18", max(e0, eb) <= 1e-12,
           f"|f_0 - 1| = {e0:.1e}, max |f_b| = {eb:.1e} (tol 1e-12)")


def test_c04_derivative_tower():
    r5, pi = np.sqrt(5.0), np.pi
    printed = [1.0, -2 * r5, 0.0, 23 * pi**2 / (30 * r5), 23 * pi**2 / 75,
               23 * pi**2 / (50 * r5) - 109 * pi**4 / (3000 * r5),
               46 * pi**2 / 375 - 59 * pi**4 / 2500,
               23 * pi**2 / (150 * r5) - 533 * pi**4 / (11250 * r5) + 359 * pi**6 / (393750 * r5),
               23 * pi**2 / 625 - 189 * pi**4 / 12500 + 427 * pi**6 / 562500]
    s0 = PV.derivatives_at_pseudovacuum(1.0, 8)
    e_first = abs(s0.coeffs[1] + 2 * r5)
    e_orders = np.abs(s0.coeffs - printed).max()
    e_closed = max(abs(PV.derivatives_at_pseudovacuum(np.exp(-2 * p), 1).coeffs[1]
                       - PV.first_derivative_closed_form(p)) for p in (0.0, 0.5, 1.0, 2.0))
    ok = e_first <= 1e-9 and e_closed <= 1e-8 and e_orders <= 1e-9
    report(4, "derivative tower around m = -1", ok,
           f"order-1 vs -2sqrt5 {e_first:.1e}; vs -2cosh^2 sqrt(5-4tanh) on 4 phis {e_closed:.1e}; "
           f"orders 0-8 at phi=0 {e_orders:.1e}")


def test_c05_mirror():
    phis = [PV.PHI_CRIT + 0.01, 1.5, 2.0, 3.0, 4.0]
    err0 = err1 = 0.0
    for p in phis:
        s = PV.mirror_derivatives_at_m1(np.exp(-2 * p), 2)
        err0 = max(err0, abs(s.coeffs[0] - 3))
        err1 = max(err1, abs(s.coeffs[1] - PV.mirror_first_derivative(p)))
    try:
        PV.mirror_derivatives_at_m1(np.exp(-2 * (PV.PHI_CRIT - 0.1)), 2)
        rejected = False
    except ValueError:
        rejected = True
    report(5, "mirror pseudo-vacuum at m = +1", err0 <= 1e-8 and err1 <= 1e-8 and rejected,
           f"|F - 3| {err0:.1e}, first derivative {err1:.1e} (tol 1e-8) for phi > {PV.PHI_CRIT:.5f}; "
           f"phi < phi_c rejected: {rejected}")


def test_c06_dual_expansion():
    d, _, _ = LP.dual_expansion_crosscheck(4, 4)
    report(6, "dual (m, x) double series to order 4", d <= 1e-10, f"max diff {d:.2e} (tol 1e-10)")


FIG9 = [1.0, -2.0843415503833818, -3.6786511453555093, 1.8521456475091602, 1.2729662567394795]
FIG12 = [1.0, -3.64696411, -1.23503222, 2.61719469, 0.48626754, -2.02445145, -2.67343473, -2.55267898]


def test_c07_trajectory1():
    t0 = time.perf_counter()
    s = TR.trajectory_energy("traj1", 1.0, 14)
    dt = time.perf_counter() - t0
    rel = np.abs((s.coeffs[:5].real - FIG9) / FIG9).max()
    e5 = TR.extrapolate(s, 0.5, 5)[0]
    e6 = TR.extrapolate(s, 0.5, 6)[0]
    clos = s.partial_sums(-0.5)[14].real
    ok = rel <= 1e-9 and abs(e5 + 0.992) <= 5e-3 and abs(e6 + 1.002) <= 5e-3 and abs(clos - 1) <= 2e-2
    report(7, "trajectory 1 coefficients, extrapolation and closure", ok and dt < 60,
           f"f_0..f_4 rel err {rel:.1e}; k_min=5 -> {e5:.4f}; k_min=6 -> {e6:.4f}; "
           f"S_15(-1/2) = {clos:.4f}; {dt:.1f}s")


def test_c08_ground_state_energy():
    s = TR.trajectory_energy("traj1", 1.0, 14)
    F = TR.extrapolate(s, 0.5, TR.TRAJ1.default_kmin)[0]
    level = TR.assemble_sl2c(F, F)
    ok = TR.assemble_sl2c(-1.0, -1.0) == 0.0 and abs(level) <= 4e-2
    report(8, "SL(2,C) ground-state level", ok, f"2 + 2F(1/2) = {level:.4f} (tol 4e-2), exact assembly 0")


def test_c09_trajectory2():
    s2 = TR.trajectory_energy("traj2", 1.0, 7)
    s1 = TR.trajectory_energy("traj1", 1.0, 14)
    err = np.abs(s2.coeffs.real - FIG12).max()
    e2 = TR.extrapolate(s2, 0.5, TR.TRAJ2.default_kmin)[0]
    e1 = TR.extrapolate(s1, 0.5, TR.TRAJ1.default_kmin)[0]
    ok = err <= 5e-5 and abs(e2 - e1) <= 3e-2
    report(9, "trajectory 2 coefficients and consistency", ok,
           f"f_0..f_7 max abs err {err:.1e} (tol 5e-5); F(1/2) {e2:.4f} vs {e1:.4f} (tol 3e-2)")


def test_c10_excitations():
    zs = np.linspace(-0.49, 0.49, 50)
    got = np.array([EX.eta_derivative_along_trajectory("traj1", z, 1.0, 0).coeffs[0] for z in zs])
    e_curve = np.abs(got - EX.eta_derivative_pseudovacuum_phi0(zs)).max()

    def lp_curve(base, phi, M=13):
        x = np.exp(-2 * phi)
        return lambda z: complex(LP.evaluate(EX.eta_derivative_largephi(base, z, M), x, M))

    cache = {}

    def phi0_curve(z):
        if z not in cache:
            cache[z] = EX.eta_derivative_along_trajectory("traj1", z, 1.0, 4)
        return complex(cache[z](0.5))

    d15, _, p15 = EX.gap_scan(lp_curve(MO.ground_state(), 1.5), 20, 121)
    d0, _, p0 = EX.gap_scan(phi0_curve, 12, 41)
    dpv, _, ppv = EX.gap_scan(lp_curve(_pv, 3.0), 20, 121)
    lead = max(abs(p.delta / (np.cos(2 * np.pi * p.z_p) * np.exp(6.0)) - 1) for p in ppv)
    ok = e_curve <= 1e-9 and min(d15, d0, dpv) >= -1e-8 and all(p0) and lead < 0.05
    report(10, "excitations: xi^0 curve and paired delta >= 0", ok,
           f"xi^0 vs closed form on 50 z {e_curve:.1e}; min delta ground phi=1.5 {d15:.3f} ({len(p15)} pairs), "
           f"ground phi=0 {d0:.3f} ({len(p0)} pairs), pseudo-vacuum phi=3 {dpv:.2f} "
           f"(rel. dev. from cos(2 pi z_p)e^(2phi) {lead:.1e})")


def test_c11_property_suites():
    fails = []
    # untwisted roots real and increasing with the Bethe numbers
    for f, L in ((MO.standard(0.5), 24), (MO.three_block(0.5), 24)):
        st = SO.solve_untwisted(L, MO.bethe_numbers_for(f, L))
        if np.any(st.roots.imag != 0) or np.any(np.diff(st.roots.real[np.argsort(st.numbers)]) <= 0):
            fails.append("reality/monotonicity")
    # twisted roots collapse to i
    nums = MO.bethe_numbers_for(MO.standard(0.25), 40)
    dev = [np.abs(s.roots - 1j).max() for s in SO.solve_twisted(40, nums, [2.0, 3.0, 4.0])]
    if not dev[0] > dev[1] > dev[2] or dev[2] > 5 * np.exp(-8.0):
        fails.append("collapse to i")
    # finite-size moments converge as 1/L
    exact = MO.standard(0.5).moments([1, 2, 3])
    errs = [np.abs(MO.finite_size_moments(MO.bethe_numbers_for(MO.standard(0.5), L), L, [1, 2, 3])
                   - exact).max() * L for L in (48, 96, 192, 384)]
    if max(errs) > 2.0:
        fails.append("O(1/L) moments")
    # convolution algebra laws
    rng = np.random.default_rng(5)
    a, b, c = (rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4)) for _ in range(3))
    if not (np.allclose(S.mul(a, b), S.mul(b, a)) and np.allclose(S.mul(S.mul(a, b), c), S.mul(a, S.mul(b, c)))
            and np.allclose(S.mul(a, b + c), S.mul(a, b) + S.mul(a, c))):
        fails.append("convolution laws")
    # arctan Taylor against finite differences
    for z0 in (0.4, 0.3 + 0.2j):
        t = S.arctan_taylor_about(z0, 2)
        h = 1e-4
        d1 = (np.arctan(z0 + h) - np.arctan(z0 - h)) / (2 * h)
        d2 = (np.arctan(z0 + h) - 2 * np.arctan(z0) + np.arctan(z0 - h)) / h**2
        if abs(t[1] - d1) > 1e-7 or abs(2 * t[2] - d2) > 1e-5:
            fails.append("arctan Taylor")
    report(11, "property suites", not fails,
           "all hold" if not fails else "failed: " + ", ".join(fails))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
