"""Kinematics: Poisson inversion, velocity recovery, zero-mean discipline.

The vorticity omega determines the stream function psi through the periodic
Poisson problem -Lap_N psi = omega (solvable and unique among mean-free
fields) and the velocity through u = (D_y psi, -D_x psi), which is
discretely divergence-free by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeanViolationError
from .spectral import (Grid, ScalarField, VectorField, divergence, l2_norm,
                       mean, perp_gradient)

__all__ = [
    "MEAN_TOLERANCE",
    "FlowState",
    "solve_poisson",
    "velocity_from_stream",
    "make_state",
    "poincare_ratio",
]

# largest |mean| silently projected away; anything bigger is a caller bug
MEAN_TOLERANCE = 1e-10


@dataclass(frozen=True)
class FlowState:
    """Vorticity with its induced stream function and velocity at one time.

    Invariants (enforced by construction through make_state): omega and psi
    are mean-free, -Lap_N psi = omega, and vel = (D_y psi, -D_x psi) so
    D_x u + D_y v vanishes to roundoff.
    """

    omega: ScalarField
    psi: ScalarField
    vel: VectorField
    time: float

    @property
    def grid(self) -> Grid:
        return self.omega.grid


def _check_mean(field: ScalarField, what: str) -> float:
    m = mean(field)
    if abs(m) > MEAN_TOLERANCE:
        raise MeanViolationError(
            f"{what} must be mean-free: discrete mean is {m:.6e} "
            f"(tolerance {MEAN_TOLERANCE:.1e})")
    return m


def solve_poisson(omega: ScalarField) -> ScalarField:
    """Solve -Lap_N psi = omega for the mean-free stream function.

    Per-mode division by 4 pi^2 |k|^2 / L^2; the (0, 0) coefficient of psi
    is set to zero (the normalization that makes the problem unique).
    Raises MeanViolationError when omega carries a mean beyond tolerance.
    """
    _check_mean(omega, "poisson right-hand side")
    g = omega.grid
    spec = omega.spectral * g._inv_ksq  # inv table is 0 at k = 0
    return ScalarField._adopt(g, spec=spec)


def velocity_from_stream(psi: ScalarField) -> VectorField:
    """Velocity (D_y psi, -D_x psi) induced by a stream function."""
    return perp_gradient(psi)


def make_state(omega: ScalarField, t: float) -> FlowState:
    """Assemble a FlowState from vorticity, projecting its mean to zero.

    A mean within MEAN_TOLERANCE is treated as roundoff drift and removed;
    a larger mean raises MeanViolationError.
    """
    _check_mean(omega, "vorticity")
    g = omega.grid
    spec = np.array(omega.spectral)  # writable copy
    spec[0, 0] = 0.0
    w = ScalarField._adopt(g, spec=spec)
    psi = ScalarField._adopt(g, spec=spec * g._inv_ksq)
    vel = perp_gradient(psi)
    return FlowState(omega=w, psi=psi, vel=vel, time=float(t))


def poincare_ratio(field: ScalarField) -> float:
    """Empirical ratio ||f||_2 / ||grad_N f||_2 for a mean-free field.

    The discrete Poincare inequality bounds this by L / (2 pi) for fields
    without Nyquist content (the lowest nonzero mode is extremal). Returns
    0 for the zero field.
    """
    from .spectral import gradient  # local import to keep module load light

    gr = gradient(field)
    denom = np.hypot(l2_norm(gr.x), l2_norm(gr.y))
    if denom == 0.0:
        return 0.0
    return l2_norm(field) / denom


def div_l2(vel: VectorField) -> float:
    """L2 norm of the discrete divergence of a velocity field."""
    return l2_norm(divergence(vel))
