"""Skew-form convection operator: orthogonality, mean, preconditions."""

import numpy as np
import pytest

from vorspec import (
    Grid,
    NotDivergenceFreeError,
    ScalarField,
    TaylorGreenSpec,
    inner_product,
    l2_norm,
    mean,
    skew_convection,
    taylor_green_exact,
)


def test_skew_symmetry_random_pairs(divfree, noise):
    """<omega, N(u, omega)> vanishes for every divergence-free velocity."""
    for n in (16, 32):
        g = Grid(n)
        for _ in range(10):
            vel = divfree(g)
            omega = noise(g)
            conv = skew_convection(vel, omega)
            scale = max(1.0, l2_norm(omega) ** 2)
            assert abs(inner_product(omega, conv)) <= 1e-10 * scale


def test_output_mean_is_exactly_zero(divfree, noise):
    g = Grid(16)
    conv = skew_convection(divfree(g), noise(g))
    assert conv.spectral[0, 0] == 0.0
    assert abs(mean(conv)) < 1e-15


def test_rejects_divergent_velocity(noise):
    from vorspec import VectorField

    g = Grid(16)
    X, _ = g.nodes()
    # a gradient field, maximally divergent
    u = ScalarField.from_physical(g, np.sin(2 * np.pi * X))
    v = ScalarField.zeros(g)
    with pytest.raises(NotDivergenceFreeError):
        skew_convection(VectorField(u, v), noise(g))


def test_taylor_green_convection_vanishes():
    # omega is a function of psi for this flow, so u.grad omega = 0
    g = Grid(32)
    st = taylor_green_exact(g, TaylorGreenSpec(nu=1e-3))
    conv = skew_convection(st.vel, st.omega)
    assert np.max(np.abs(conv.physical)) < 1e-10


def test_matches_advective_form_for_smooth_fields(divfree, noise):
    """On well-resolved fields the skew form equals twice the advective
    form up to the subtracted mean (div(u w) = u.grad w discretely only up
    to aliasing, absent when the product spectrum fits)."""
    from vorspec import derivative

    g = Grid(64)
    vel = divfree(g, decay=8.0)
    omega = noise(g, decay=8.0)
    conv = skew_convection(vel, omega)

    adv_phys = (vel.x.physical * derivative(omega, "x").physical
                + vel.y.physical * derivative(omega, "y").physical)
    two_adv = 2.0 * (adv_phys - np.mean(adv_phys))
    rel = np.max(np.abs(conv.physical - two_adv)) / max(
        1.0, np.max(np.abs(two_adv)))
    assert rel < 1e-5


def test_dealias_flag_truncates_high_modes(divfree, noise):
    g = Grid(16)
    vel = divfree(g, decay=1.0)
    omega = noise(g, decay=1.0)
    conv = skew_convection(vel, omega, dealias=True)
    assert np.all(conv.spectral[~g.dealias_mask] == 0.0)


def test_dealias_keeps_skew_symmetry_on_truncated_fields(divfree, noise):
    # when omega itself lives inside the mask, <omega, P N> = <omega, N> = 0
    g = Grid(16)
    omega = noise(g, decay=1.0)
    omega = ScalarField.from_spectral(
        g, np.where(g.dealias_mask, omega.spectral, 0.0))
    vel = divfree(g, decay=1.0)
    conv = skew_convection(vel, omega, dealias=True)
    scale = max(1.0, l2_norm(omega) ** 2)
    assert abs(inner_product(omega, conv)) <= 1e-10 * scale
