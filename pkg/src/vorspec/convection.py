"""Skew-symmetric convection term with mean correction.

The nonlinear term is evaluated in the Temam form

    N(u, omega) = u . grad_N omega + div_N(u omega) - avg(u . grad_N omega),

with products formed pointwise in physical space and derivatives taken
spectrally. The flux-divergence half is exactly mean-free (first-derivative
multipliers vanish at k = 0), so only the advective half needs its average
subtracted. For divergence-free u the sum is discretely orthogonal to
omega: summation by parts turns <omega, div_N(u omega)> into
-<u . grad_N omega, omega>, so the two halves cancel in the inner product.
This orthogonality is what controls aliasing in the analyzed scheme; no
dealiasing is applied by default.
"""

from __future__ import annotations

import numpy as np

from .errors import NotDivergenceFreeError
from .fields import div_l2
from .spectral import ScalarField, VectorField, l2_norm

__all__ = ["DIV_FREE_TOLERANCE", "skew_convection"]

# looser than the construction guarantee (1e-12 scaled) on purpose, so that
# accumulated roundoff over long runs never trips the precondition
DIV_FREE_TOLERANCE = 1e-8


def skew_convection(vel: VectorField, omega: ScalarField,
                    dealias: bool = False) -> ScalarField:
    """Evaluate N(u, omega) for a divergence-free velocity.

    Parameters
    ----------
    vel : VectorField
        Advecting velocity; its discrete divergence must satisfy
        ||div_N vel||_2 <= DIV_FREE_TOLERANCE * ||omega||_2.
    omega : ScalarField
        Advected vorticity, expected mean-free.
    dealias : bool
        When True, apply the 2/3-rule truncation to the transforms of the
        quadratic products. Off by default; the skew form itself is the
        aliasing control in the analyzed scheme.

    Returns
    -------
    ScalarField
        Spectral-fresh field with |mean| at roundoff level.

    Raises
    ------
    NotDivergenceFreeError
        If the velocity fails the precondition check.
    """
    g = omega.grid
    w_l2 = l2_norm(omega)
    d = div_l2(vel)
    if d > DIV_FREE_TOLERANCE * w_l2:
        raise NotDivergenceFreeError(
            f"velocity is not discretely divergence-free: ||div u||_2 = "
            f"{d:.6e} exceeds {DIV_FREE_TOLERANCE:.1e} * ||omega||_2 = "
            f"{DIV_FREE_TOLERANCE * w_l2:.6e}")

    u = vel.x.physical
    v = vel.y.physical
    w = omega.physical
    n2 = g.n * g.n

    # advective half: products pointwise, derivatives spectral
    wspec = omega.spectral
    wx = np.fft.ifft2(wspec * g._d1x).real * n2
    wy = np.fft.ifft2(wspec * g._d1y).real * n2
    adv = u * wx + v * wy

    # flux half: transform the pointwise fluxes, differentiate spectrally
    flux_x_spec = np.fft.fft2(u * w) / n2
    flux_y_spec = np.fft.fft2(v * w) / n2

    adv_spec = np.fft.fft2(adv) / n2
    adv_spec[0, 0] = 0.0  # mean correction applies to the advective half only
    result = adv_spec + flux_x_spec * g._d1x + flux_y_spec * g._d1y
    if dealias:
        result = np.where(g.dealias_mask, result, 0.0)
    return ScalarField._adopt(g, spec=result)
