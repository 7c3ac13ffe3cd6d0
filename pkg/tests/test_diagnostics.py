"""Diagnostics: telescope coefficients, norms, functionals, records."""

import numpy as np
import pytest

from vorspec import (
    Grid,
    ScalarField,
    SeriesRecord,
    TaylorGreenSpec,
    bdf3_stencil,
    div_error,
    energy,
    enstrophy,
    get_telescope_coefficients,
    hm_norm,
    l2_norm,
    make_record,
    make_state,
    solve_telescope_coefficients,
    stability_F,
    stability_G1,
    taylor_green_exact,
    verify_telescope,
)


# --- telescope coefficient solve ---------------------------------------------


@pytest.fixture(scope="module")
def coeffs():
    return get_telescope_coefficients()


def test_solver_residual(coeffs):
    assert coeffs.residual < 1e-12


def test_canonical_signs(coeffs):
    a = coeffs.alpha
    assert a[0] > 0
    assert a[1] >= 0
    assert a[3] >= 0
    assert a[6] >= 0


def test_sum_constraint(coeffs):
    assert abs(sum(coeffs.alpha[6:10])) < 1e-12


def test_square_coefficient_sum(coeffs):
    # the a^2 coefficient of the decomposition must equal that of the
    # stencil product: 11/6 * 2 = 11/3
    a = coeffs.alpha
    total = a[0] ** 2 + a[1] ** 2 + a[3] ** 2 + a[6] ** 2
    assert total == pytest.approx(11.0 / 3.0, abs=1e-10)


def test_identity_on_random_tuples(coeffs, rng):
    a = np.array(coeffs.alpha)
    for _ in range(200):
        w = rng.normal(size=4) * 3.0
        lhs = bdf3_stencil(*w) * (2.0 * w[0] - w[1])

        def P(x, y, z):
            return ((a[0] * x) ** 2 + (a[1] * x + a[2] * y) ** 2
                    + (a[3] * x + a[4] * y + a[5] * z) ** 2)

        rhs = (P(w[0], w[1], w[2]) - P(w[1], w[2], w[3])
               + (a[6] * w[0] + a[7] * w[1] + a[8] * w[2] + a[9] * w[3]) ** 2)
        assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(lhs))


def test_verify_telescope_residual(coeffs):
    assert verify_telescope(coeffs, trials=500) <= 1e-10


def test_verify_rejects_zero_trials(coeffs):
    with pytest.raises(ValueError):
        verify_telescope(coeffs, trials=0)


def test_composite_constants_positive(coeffs):
    assert coeffs.alpha1_star > 0
    assert coeffs.alpha2_star > 0
    assert coeffs.alpha3_star > 0


def test_resolve_is_deterministic(coeffs):
    again = solve_telescope_coefficients()
    assert again.alpha == coeffs.alpha
    assert again.distinct_solutions == coeffs.distinct_solutions


def test_distinct_canonical_solutions(coeffs):
    # the constrained system has a known finite solution set
    assert coeffs.distinct_solutions == 2


def test_bdf3_stencil_annihilates_constants():
    assert bdf3_stencil(3.0, 3.0, 3.0, 3.0) == pytest.approx(0.0, abs=1e-15)


def test_bdf3_stencil_derivative_weights():
    # exact for cubics: stencil at equal spacing reproduces f'(t) * dt
    ts = np.array([3.0, 2.0, 1.0, 0.0])
    f = ts**3 - 2 * ts**2 + 5
    got = bdf3_stencil(*f)
    want = 3 * 9.0 - 4 * 3.0  # f'(3) with dt = 1
    assert got == pytest.approx(want, rel=1e-13)


# --- norms -------------------------------------------------------------------


def test_hm_norm_orders(noise):
    g = Grid(16)
    f = noise(g)
    assert hm_norm(f, 0) == pytest.approx(l2_norm(f), rel=1e-13)
    # on a single mode, each order multiplies by 2 pi |k|
    X, _ = g.nodes()
    s = ScalarField.from_physical(g, np.sin(2 * np.pi * 3 * X))
    ratio = hm_norm(s, 1) / hm_norm(s, 0)
    assert ratio == pytest.approx(2 * np.pi * 3, rel=1e-12)
    ratio2 = hm_norm(s, 2) / hm_norm(s, 0)
    assert ratio2 == pytest.approx((2 * np.pi * 3) ** 2, rel=1e-12)


def test_hm_norm_rejects_negative_order(noise):
    with pytest.raises(ValueError):
        hm_norm(noise(Grid(8)), -1)


def test_taylor_green_invariants():
    g = Grid(32)
    st = taylor_green_exact(g, TaylorGreenSpec(nu=1e-3))
    assert l2_norm(st.omega) == pytest.approx(2 * np.pi, rel=1e-13)
    assert energy(st) == pytest.approx(0.25, rel=1e-13)
    assert enstrophy(st) == pytest.approx(2 * np.pi**2, rel=1e-13)
    assert div_error(st) < 1e-13


# --- stability functionals -----------------------------------------------------


def test_stability_f_constant_history(coeffs, noise):
    """With all levels equal the difference terms drop and F collapses to
    a computable multiple of the norms."""
    g = Grid(16)
    w = noise(g)
    nu, dt = 0.02, 0.01
    a = coeffs.alpha
    F = stability_F([w, w, w], nu=nu, dt=dt, coeffs=coeffs)
    l2sq = l2_norm(w) ** 2
    h1sq = hm_norm(w, 1) ** 2
    want = ((a[0] ** 2 + (a[1] + a[2]) ** 2 + (a[3] + a[4] + a[5]) ** 2) * l2sq
            + nu * dt * (7.0 / 4.0 + 15.0 / 32.0 + 13.0 / 64.0) * h1sq)
    assert F == pytest.approx(want, rel=1e-12)


def test_stability_g1_constant_history(coeffs, noise):
    g = Grid(16)
    w = noise(g)
    nu, dt = 0.02, 0.01
    a = coeffs.alpha
    G1 = stability_G1([w, w, w], nu=nu, dt=dt, coeffs=coeffs)
    h1sq = hm_norm(w, 1) ** 2
    h2sq = hm_norm(w, 2) ** 2
    want = ((a[0] ** 2 + (a[1] + a[2]) ** 2 + (a[3] + a[4] + a[5]) ** 2) * h1sq
            + nu * dt * (37.0 / 24.0 + 17.0 / 48.0 + 17.0 / 96.0) * h2sq)
    assert G1 == pytest.approx(want, rel=1e-12)


def test_stability_f_bounds_l2_norm(coeffs, noise):
    # F >= alpha1^2 ||w||^2 by positivity of the remaining terms
    g = Grid(16)
    for _ in range(10):
        hist = [noise(g) for _ in range(3)]
        F = stability_F(hist, nu=0.01, dt=0.01, coeffs=coeffs)
        assert l2_norm(hist[0]) ** 2 <= F / coeffs.alpha[0] ** 2 + 1e-12


def test_short_history_padding(coeffs, noise):
    g = Grid(16)
    w = noise(g)
    one = stability_F([w], nu=0.01, dt=0.01, coeffs=coeffs)
    three = stability_F([w, w, w], nu=0.01, dt=0.01, coeffs=coeffs)
    assert one == pytest.approx(three, rel=1e-14)
    with pytest.raises(ValueError):
        stability_F([], nu=0.01, dt=0.01, coeffs=coeffs)


# --- series records -------------------------------------------------------------


def test_series_record_field_order():
    assert SeriesRecord.FIELDS == ("t", "l2_omega", "h1_omega", "energy",
                                   "enstrophy", "div_error", "max_omega",
                                   "F", "G1")


def test_make_record_values(coeffs):
    g = Grid(32)
    st = taylor_green_exact(g, TaylorGreenSpec(nu=1e-3))
    rec = make_record(st, history=[st.omega], nu=1e-3, dt=0.01, coeffs=coeffs)
    assert rec.t == 0.0
    assert rec.l2_omega == pytest.approx(2 * np.pi, rel=1e-13)
    assert rec.energy == pytest.approx(0.25, rel=1e-13)
    assert rec.enstrophy == pytest.approx(2 * np.pi**2, rel=1e-13)
    assert rec.max_omega == pytest.approx(4 * np.pi, rel=1e-12)
    assert rec.values() == tuple(getattr(rec, k) for k in SeriesRecord.FIELDS)
    assert rec.F > 0 and rec.G1 > 0
