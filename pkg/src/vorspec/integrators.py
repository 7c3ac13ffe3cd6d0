"""IMEX time steppers: Euler, BDF2, and the third-order BDF scheme.

All schemes treat diffusion implicitly and convection explicitly, so every
step reduces to one diagonal Helmholtz solve per Fourier mode:

    euler:  (w' - w)/dt + N/2 = nu Lap w' + f',                   a = 1
    bdf2 :  (3w' - 4w + w_)/2dt + N - N_/2 = nu Lap w' + f',      a = 3/2
    bdf3 :  (11w'/6 - 3w + 3w_/2 - w__/3)/dt
                + 3N/2 - 3N_/2 + N__/2 = nu Lap w' + f',          a = 11/6

where primes mark the new level and trailing underscores older history.
The skew convection term N counts the transport twice (advective plus flux
form), so the extrapolation weights above are half the usual explicit
multistep weights; their sums are 1/2, making each scheme consistent with
the single transport term of the vorticity equation.
The startup ladder computes w^1 with one explicit-midpoint RK2 step on the
fully explicit right-hand side and w^2 with one BDF2 step, after which the
third-order recurrence runs; this preserves third-order global accuracy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .convection import skew_convection
from .diagnostics import (SeriesRecord, get_telescope_coefficients,
                          make_record)
from .errors import BlowUpError, ConfigError, MeanViolationError, \
    StartupRequiredError
from .fields import MEAN_TOLERANCE, FlowState, make_state
from .spectral import Grid, ScalarField, l2_norm, mean

__all__ = [
    "SchemeId",
    "RunConfig",
    "Level",
    "SolverState",
    "RunSummary",
    "helmholtz_solve",
    "euler_step",
    "bdf2_step",
    "bdf3_step",
    "startup",
    "run",
    "BLOWUP_FACTOR",
]

# a run is declared blown up when ||w||_2 exceeds this multiple of its
# initial value, or any field value becomes non-finite
BLOWUP_FACTOR = 1e6


class SchemeId(Enum):
    """Time integrator identifier."""

    IMEX_EULER = "imex_euler"
    IMEX_BDF2 = "imex_bdf2"
    IMEX_BDF3 = "imex_bdf3"

    @property
    def history_required(self) -> int:
        return {SchemeId.IMEX_EULER: 1,
                SchemeId.IMEX_BDF2: 2,
                SchemeId.IMEX_BDF3: 3}[self]


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one simulation run.

    t_final is interpreted as n_steps * dt with n_steps = round(t_final/dt);
    series records are emitted every series_every steps (plus step 0 and the
    final step), snapshots every snapshot_every steps when positive.
    """

    n: int
    dt: float
    nu: float
    t_final: float
    scheme: SchemeId = SchemeId.IMEX_BDF3
    snapshot_every: int = 0
    series_every: int = 1
    dealias: bool = False
    length: float = 1.0

    def __post_init__(self):
        if self.n < 4:
            raise ConfigError(f"grid size must be at least 4, got {self.n}")
        if not (self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.nu > 0):
            raise ConfigError(f"nu must be positive, got {self.nu}")
        if self.t_final < self.dt:
            raise ConfigError(
                f"t_final = {self.t_final} is shorter than one step dt = {self.dt}")
        if self.series_every < 1:
            raise ConfigError("series_every must be a positive integer")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be nonnegative")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class Level:
    """One history level: the vorticity and its cached convection term."""

    omega: ScalarField
    conv: ScalarField


@dataclass(frozen=True)
class SolverState:
    """Multistep integrator state positioned after step step_index.

    history is newest-first, up to three levels; every stored vorticity is
    mean-free and each cached convection term was computed from its own
    level's flow state.
    """

    grid: Grid
    history: tuple
    step_index: int
    dt: float
    nu: float
    forcing: Optional[Callable[[float], ScalarField]] = None
    dealias: bool = False


@dataclass
class RunSummary:
    """What a completed run reports back."""

    final_state: FlowState
    steps: int
    elapsed_seconds: float
    seconds_per_step: float
    extrema: dict
    records: list = field(default_factory=list)


def helmholtz_solve(rhs: ScalarField, a: float, dt: float,
                    nu: float) -> ScalarField:
    """Solve (a/dt - nu Lap_N) w = rhs by per-mode division.

    The symbol a/dt + nu * 4 pi^2 |k|^2 / L^2 is strictly positive, so the
    solve is total; a mean-free rhs yields a mean-free solution since the
    k = 0 mode is divided by a/dt alone.
    """
    if not (a > 0 and dt > 0):
        raise ValueError("helmholtz_solve needs a > 0 and dt > 0")
    m = mean(rhs)
    if abs(m) > MEAN_TOLERANCE:
        raise MeanViolationError(
            f"helmholtz right-hand side has mean {m:.6e} beyond tolerance")
    g = rhs.grid
    denom = a / dt + nu * g._ksq
    return ScalarField._adopt(g, spec=rhs.spectral / denom)


def _forcing_spec(state_or_none, t: float, grid: Grid):
    """Spectral coefficients of the forcing at time t, or None."""
    if state_or_none is None:
        return None
    f = state_or_none(t)
    if f.grid != grid:
        raise ConfigError("forcing returned a field on the wrong grid")
    m = mean(f)
    if abs(m) > MEAN_TOLERANCE:
        raise MeanViolationError(
            f"forcing at t = {t} has mean {m:.6e}; it must be mean-free")
    return f.spectral


def _advance(state: SolverState, a: float, rhs_spec) -> tuple:
    """Shared tail of every scheme: solve, rebuild kinematics, cache N."""
    g = state.grid
    t_new = (state.step_index + 1) * state.dt
    rhs = ScalarField._adopt(g, spec=rhs_spec)
    w_new = helmholtz_solve(rhs, a, state.dt, state.nu)
    flow = make_state(w_new, t_new)
    conv = skew_convection(flow.vel, flow.omega, dealias=state.dealias)
    depth = min(len(state.history) + 1, 3)
    new_history = (Level(flow.omega, conv),) + state.history[:depth - 1]
    new_state = replace(state, history=new_history,
                        step_index=state.step_index + 1)
    return flow, new_state


def euler_step(state: SolverState) -> tuple:
    """One first-order IMEX Euler step."""
    if len(state.history) < 1:
        raise StartupRequiredError("euler step needs one history level")
    dt = state.dt
    lvl = state.history[0]
    rhs = lvl.omega.spectral / dt - 0.5 * lvl.conv.spectral
    fsp = _forcing_spec(state.forcing, (state.step_index + 1) * dt, state.grid)
    if fsp is not None:
        rhs = rhs + fsp
    return _advance(state, 1.0, rhs)


def bdf2_step(state: SolverState) -> tuple:
    """One second-order IMEX BDF step with extrapolated convection."""
    if len(state.history) < 2:
        raise StartupRequiredError("bdf2 step needs two history levels")
    dt = state.dt
    l0, l1 = state.history[0], state.history[1]
    rhs = (2.0 / dt * l0.omega.spectral - 0.5 / dt * l1.omega.spectral
           - l0.conv.spectral + 0.5 * l1.conv.spectral)
    fsp = _forcing_spec(state.forcing, (state.step_index + 1) * dt, state.grid)
    if fsp is not None:
        rhs = rhs + fsp
    return _advance(state, 1.5, rhs)


def bdf3_step(state: SolverState) -> tuple:
    """One third-order IMEX BDF step with quadratic convection extrapolation."""
    if len(state.history) < 3:
        raise StartupRequiredError("bdf3 step needs three history levels")
    dt = state.dt
    l0, l1, l2 = state.history[0], state.history[1], state.history[2]
    rhs = (3.0 / dt * l0.omega.spectral
           - 1.5 / dt * l1.omega.spectral
           + 1.0 / (3.0 * dt) * l2.omega.spectral
           - 1.5 * l0.conv.spectral
           + 1.5 * l1.conv.spectral
           - 0.5 * l2.conv.spectral)
    fsp = _forcing_spec(state.forcing, (state.step_index + 1) * dt, state.grid)
    if fsp is not None:
        rhs = rhs + fsp
    return _advance(state, 11.0 / 6.0, rhs)


_STEP_FN = {SchemeId.IMEX_EULER: euler_step,
            SchemeId.IMEX_BDF2: bdf2_step,
            SchemeId.IMEX_BDF3: bdf3_step}


def _explicit_rhs_spec(flow: FlowState, conv: ScalarField, nu: float,
                       forcing, t: float):
    """Fully explicit right-hand side -N/2 + nu Lap w + f in spectral form."""
    g = flow.grid
    rhs = -0.5 * conv.spectral + nu * (g._lap * flow.omega.spectral)
    fsp = _forcing_spec(forcing, t, g)
    if fsp is not None:
        rhs = rhs + fsp
    return rhs


def _startup_states(omega0: ScalarField, cfg: RunConfig, forcing):
    """Initial flow states and the solver state ready for the main scheme.

    Returns (states, solver_state) where states holds the flow states of
    steps 0 .. history_required - 1 in time order.
    """
    grid = omega0.grid
    if grid.n != cfg.n or grid.length != cfg.length:
        raise ConfigError(
            f"initial data on {grid} does not match config (n={cfg.n}, "
            f"length={cfg.length})")
    dt, nu = cfg.dt, cfg.nu
    need = cfg.scheme.history_required

    flow0 = make_state(omega0, 0.0)
    conv0 = skew_convection(flow0.vel, flow0.omega, dealias=cfg.dealias)
    state = SolverState(grid=grid, history=(Level(flow0.omega, conv0),),
                        step_index=0, dt=dt, nu=nu, forcing=forcing,
                        dealias=cfg.dealias)
    states = [flow0]
    if need == 1:
        return states, state

    # w^1 by one explicit-midpoint step on the fully explicit right side
    k1 = _explicit_rhs_spec(flow0, conv0, nu, forcing, 0.0)
    w_half = ScalarField._adopt(grid, spec=flow0.omega.spectral + 0.5 * dt * k1)
    flow_half = make_state(w_half, 0.5 * dt)
    conv_half = skew_convection(flow_half.vel, flow_half.omega,
                                dealias=cfg.dealias)
    k2 = _explicit_rhs_spec(flow_half, conv_half, nu, forcing, 0.5 * dt)
    w1 = ScalarField._adopt(grid, spec=flow0.omega.spectral + dt * k2)
    flow1 = make_state(w1, dt)
    conv1 = skew_convection(flow1.vel, flow1.omega, dealias=cfg.dealias)
    state = replace(state, history=(Level(flow1.omega, conv1),) + state.history,
                    step_index=1)
    states.append(flow1)
    if need == 2:
        return states, state

    # w^2 by one BDF2 step
    flow2, state = bdf2_step(state)
    states.append(flow2)
    return states, state


def startup(omega0: ScalarField, cfg: RunConfig,
            forcing=None) -> SolverState:
    """Fill the multistep history for cfg.scheme starting from omega0.

    For the third-order scheme this takes the RK2 and BDF2 ladder steps and
    returns a three-level state positioned at step 2.
    """
    _, state = _startup_states(omega0, cfg, forcing)
    return state


def _check_blowup(flow: FlowState, w_l2: float, ref_l2: float, step: int,
                  last_record):
    if not np.isfinite(w_l2) or (ref_l2 > 0 and w_l2 > BLOWUP_FACTOR * ref_l2):
        raise BlowUpError(
            f"solution blew up at step {step}: ||w||_2 = {w_l2:.6e} "
            f"(initial {ref_l2:.6e})", step=step, last_record=last_record)


def run(omega0: ScalarField, cfg: RunConfig, *, forcing=None,
        series_sink=None, snapshot_sink=None, observer=None) -> RunSummary:
    """Integrate from t = 0 to t_final and stream diagnostics.

    Parameters
    ----------
    omega0 : ScalarField
        Initial vorticity on a grid matching cfg.
    cfg : RunConfig
        Scheme, step size, viscosity, cadences.
    forcing : callable, optional
        t -> mean-free ScalarField source term.
    series_sink : callable, optional
        Receives each emitted SeriesRecord.
    snapshot_sink : callable, optional
        Receives (step, FlowState) every snapshot_every steps.
    observer : callable, optional
        Receives (step, FlowState) for every step including step 0
        (measurement hook; convergence studies use it).

    Returns RunSummary; raises BlowUpError when the solution leaves the
    finite range, reporting the failing step and the last good record.
    """
    n_steps = cfg.n_steps
    need = cfg.scheme.history_required
    if n_steps < need - 1:
        raise ConfigError(
            f"{cfg.scheme.value} startup needs {need - 1} steps but the run "
            f"has only {n_steps}")
    coeffs = get_telescope_coefficients()
    step_fn = _STEP_FN[cfg.scheme]

    records = []
    last_record = None

    def emit(flow, hist):
        nonlocal last_record
        rec = make_record(flow, history=hist, nu=cfg.nu, dt=cfg.dt,
                          coeffs=coeffs)
        records.append(rec)
        last_record = rec
        if series_sink is not None:
            series_sink(rec)

    t0 = time.perf_counter()
    init_states, state = _startup_states(omega0, cfg, forcing)
    ref_l2 = l2_norm(init_states[0].omega)

    flow = init_states[0]
    depth = len(state.history)
    for k, fl in enumerate(init_states):
        flow = fl
        w_l2 = l2_norm(fl.omega)
        _check_blowup(fl, w_l2, ref_l2, k, last_record)
        if observer is not None:
            observer(k, fl)
        if k % cfg.series_every == 0 or k == n_steps:
            # the stored state is already past these steps; take the history
            # suffix that existed at step k (levels k, k-1, ..., 0)
            emit(fl, [lvl.omega for lvl in state.history[depth - 1 - k:]])
        if cfg.snapshot_every > 0 and k % cfg.snapshot_every == 0 \
                and snapshot_sink is not None:
            snapshot_sink(k, fl)
        if k == n_steps:
            break

    while state.step_index < n_steps:
        flow, state = step_fn(state)
        k = state.step_index
        w_l2 = l2_norm(flow.omega)
        _check_blowup(flow, w_l2, ref_l2, k, last_record)
        if observer is not None:
            observer(k, flow)
        if k % cfg.series_every == 0 or k == n_steps:
            emit(flow, [lvl.omega for lvl in state.history])
        if cfg.snapshot_every > 0 and k % cfg.snapshot_every == 0 \
                and snapshot_sink is not None:
            snapshot_sink(k, flow)

    elapsed = time.perf_counter() - t0
    extrema = {}
    for name in SeriesRecord.FIELDS:
        vals = [getattr(r, name) for r in records]
        extrema[name] = (min(vals), max(vals))
    return RunSummary(final_state=flow, steps=n_steps,
                      elapsed_seconds=elapsed,
                      seconds_per_step=elapsed / max(n_steps, 1),
                      extrema=extrema, records=records)
