import numpy as np
import pytest

from bethecont import largephi as LP
from bethecont import moments as MO
from bethecont import solver as SO


def random_moments(rng):
    X = rng.normal(size=60) + 1j * rng.normal(size=60)
    return lambda a: X[np.asarray(a) + 1]  # entries for a = -1, 0, 1, ...


def printed_rows(X):
    Xm1, X0, X1, X2 = X(-1), X(0), X(1), X(2)
    f_m1 = Xm1 / 2
    f0 = X0 + 2 * X0**2 - 2 * X1 * Xm1
    f1 = (0.5 - 2 * X0 - 4 * X0**2) * X1 - 4 * Xm1 * X1**2 + 2 * (1 + 4 * X0) * Xm1 * X2
    return f_m1, f0, f1


def test_first_rows_match_printed_formulas():
    rng = np.random.default_rng(7)
    for _ in range(20):
        X = random_moments(rng)
        s = LP.expand_coefficients(X, 6)
        for b, want in zip((-1, 0, 1), printed_rows(X)):
            assert abs(s.coeff(b) - want) <= 1e-12 * max(1, abs(want))


def test_pseudo_vacuum_exact(pv_moments):
    s = LP.expand_coefficients(pv_moments, 20)
    assert s.coeff(-1) == 0
    assert abs(s.coeff(0) - 1) <= 1e-12
    assert np.abs(s.f[2:]).max() <= 1e-12
    assert LP.estimate_radius(s) == np.inf


def test_truncation_stability():
    f = MO.three_block(0.25)
    a = LP.expand_coefficients(f, 12)
    b = LP.expand_coefficients(f, 14)
    assert np.allclose(a.f, b.f[:12], atol=1e-12, rtol=1e-12)


@pytest.mark.parametrize("make", [MO.standard, MO.edge_split, MO.three_block])
@pytest.mark.parametrize("m", [0.25, 0.5, 0.75])
def test_reality(make, m):
    s = LP.expand_coefficients(make(m), 20)
    assert np.abs(s.f.imag).max() <= 1e-10 * max(1.0, np.abs(s.f).max())


def test_standard_quarter_filling_values():
    s = LP.expand_coefficients(MO.standard(0.25), 20)
    assert s.coeff(-1).real == pytest.approx(np.sin(np.pi / 4) / (2 * np.pi), abs=1e-14)
    assert LP.estimate_radius(s) == pytest.approx(0.2427, abs=2e-3)


def test_estimate_radius_geometric_and_errors():
    assert LP.estimate_radius(3.0 ** np.arange(12)) == pytest.approx(1 / 3, rel=0.05)
    with pytest.raises(ValueError):
        LP.estimate_radius(np.ones(5))


def test_mirror_derivative_radius():
    st = MO.standard(1.0)
    s = LP.expand_coefficients(lambda a: st.moment_taylor(a, 1), 30)
    r = LP.estimate_radius(s.f[:, 1])
    assert r == pytest.approx(7 - 4 * np.sqrt(3), rel=0.07)


def test_evaluate():
    s = LP.LargePhiSeries(np.array([0.0, 1.0, 0.0]), np.zeros(1))
    assert LP.evaluate(s, 0.3) == pytest.approx(1.0)
    assert np.allclose(LP.evaluate(s, np.array([0.1, 0.2])), 1.0)
    assert LP.evaluate(s, 0.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        LP.evaluate(LP.LargePhiSeries(np.array([1.0, 1.0]), np.zeros(1)), 0.0)


def test_pseudo_vacuum_config_evaluates_to_one(pv_moments):
    s = LP.expand_coefficients(pv_moments, 12)
    assert np.allclose(LP.evaluate(s, np.linspace(0.01, 0.5, 7)), 1.0, atol=1e-13)


def test_dual_expansion_crosscheck():
    d, got, want = LP.dual_expansion_crosscheck(4, 4)
    assert d <= 1e-10
    # m^1: 1/(2x) + 1 + x/2 ; m^3 has no x^0 term
    assert np.allclose(got[1, :3], [0.5, 1.0, 0.5])
    assert abs(got[3, 1]) < 1e-12


def test_series_against_solver_quarter_filling():
    f = MO.standard(0.25)
    s = LP.expand_coefficients(f, 20)
    uc = LP.estimate_radius(s)
    xs = np.array([0.3, 0.6]) * uc
    nums = MO.bethe_numbers_for(f, 200)
    states = SO.solve_twisted(200, nums, -0.5 * np.log(xs))
    for x, st in zip(xs, states):
        assert abs(LP.evaluate(s, x) - st.energy) < 1e-2
