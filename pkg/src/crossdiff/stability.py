"""Linear stability around uniform states and steady-state diagnostics.

Cosine perturbations of a uniform pair (ra_bar, rb_bar) grow or decay at

    alpha_pm(k) = k^2 * d0 * (-1 +- kappa*sqrt(ra_bar*rb_bar)),

so the uniform state is linearly stable iff
``beta*c <= 1 / (2*sqrt(ra_bar*rb_bar))``. On a zero-flux box the realizable
modes are cosines with k = n*pi/L per axis, measured from the left wall.
The empirical rate is fit from the volume-weighted projection of rho_a onto
one such mode along a simulated trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (SignalBelowNoiseError, WindowTooShortError, ZeroMeanError)
from .grid import Field, GridSpec, mean_value
from .integrate import InitialCondition
from .model import ModelParams, SystemState

NOISE_FLOOR = 1e-13
MIN_FIT_SAMPLES = 5


@dataclass(frozen=True)
class DispersionPoint:
    """Growth rates of the two branches at one wavenumber; minus <= plus."""

    k: float
    alpha_plus: float
    alpha_minus: float


@dataclass(frozen=True)
class SteadyStatePair:
    """Spatial means, which mass conservation pins for all time."""

    rho_a_inf: float
    rho_b_inf: float

    def __post_init__(self):
        object.__setattr__(self, "rho_a_inf", float(self.rho_a_inf))
        object.__setattr__(self, "rho_b_inf", float(self.rho_b_inf))
        if self.rho_a_inf < 0.0 or self.rho_b_inf < 0.0:
            raise ValueError("steady-state means must be nonnegative")

    def as_tuple(self) -> tuple[float, float]:
        return (self.rho_a_inf, self.rho_b_inf)


class FlatnessReport(NamedTuple):
    flat: bool
    spread_a: float
    spread_b: float


def growth_rates(k: float, rho_bar: tuple[float, float],
                 params: ModelParams) -> DispersionPoint:
    """Both roots of the perturbation characteristic polynomial at wavenumber k."""
    k = float(k)
    ra, rb = float(rho_bar[0]), float(rho_bar[1])
    if k < 0.0:
        raise ValueError("wavenumber must be nonnegative")
    if ra < 0.0 or rb < 0.0:
        raise ValueError("mean densities must be nonnegative")
    s = params.kappa * math.sqrt(ra * rb)
    base = k * k * params.d0
    return DispersionPoint(k=k, alpha_plus=base * (-1.0 + s),
                           alpha_minus=base * (-1.0 - s))


def stability_threshold(rho_bar: tuple[float, float]) -> float:
    """Critical beta*c below which every mode decays: 1/(2*sqrt(ra_bar*rb_bar))."""
    ra, rb = float(rho_bar[0]), float(rho_bar[1])
    if ra <= 0.0 or rb <= 0.0:
        raise ZeroMeanError(f"mean densities must be positive, got {rho_bar}")
    return 1.0 / (2.0 * math.sqrt(ra * rb))


def neumann_wavenumbers(grid: GridSpec, n_max: int) -> list[float]:
    """Admissible |k| of zero-flux cosine modes, ascending, merged within 1e-12."""
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if grid.dim == 1:
        ks = [n * math.pi / grid.lengths[0] for n in range(1, n_max + 1)]
    else:
        lx, ly = grid.lengths
        ks = []
        for nx in range(n_max + 1):
            for ny in range(n_max + 1):
                if nx == 0 and ny == 0:
                    continue
                ks.append(math.hypot(nx * math.pi / lx, ny * math.pi / ly))
        ks.sort()
    merged: list[float] = []
    for k in ks:
        if not merged or k - merged[-1] > 1e-12:
            merged.append(k)
    return merged


def steady_state_of(obj, grid: GridSpec | None = None) -> SteadyStatePair:
    """Per-species mass over domain volume, from a state or an initial condition."""
    if isinstance(obj, SystemState):
        state = obj
    elif isinstance(obj, InitialCondition):
        if grid is None:
            raise ValueError("a grid is required to evaluate an InitialCondition")
        state = obj.build(grid)
    else:
        raise TypeError(f"expected SystemState or InitialCondition, got {type(obj)!r}")
    return SteadyStatePair(mean_value(state.rho_a), mean_value(state.rho_b))


def cosine_mode(grid: GridSpec, k: float) -> np.ndarray:
    """cos(k*(x - x_min)) along axis 0, broadcast over the cell shape."""
    x = grid.centers(0) - (-0.5 * grid.lengths[0])
    vals = np.cos(float(k) * x)
    if grid.dim == 2:
        vals = np.repeat(vals[:, None], grid.cells[1], axis=1)
    return vals


def perturbed_uniform_state(grid: GridSpec, rho_bar: tuple[float, float], k: float,
                            delta: float) -> SystemState:
    """Uniform pair plus a small cosine mode on the slow (alpha_plus) branch,
    whose eigenvector has delta_b = -sqrt(rb_bar/ra_bar)*delta_a."""
    ra, rb = float(rho_bar[0]), float(rho_bar[1])
    if ra <= 0.0 or rb <= 0.0:
        raise ZeroMeanError(f"mean densities must be positive, got {rho_bar}")
    mode = cosine_mode(grid, k)
    da = float(delta)
    db = -math.sqrt(rb / ra) * da
    return SystemState(t=0.0,
                       rho_a=Field(grid, ra + da * mode),
                       rho_b=Field(grid, rb + db * mode))


def mode_projection(state: SystemState, k: float) -> float:
    """Volume-weighted inner product of (rho_a - mean) with the cosine mode."""
    mode = cosine_mode(state.grid, k)
    dev = state.rho_a.values - mean_value(state.rho_a)
    return float((dev * mode).sum()) * state.grid.cell_volume


def measure_growth_rate(states, k: float,
                        window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of log|projection| over the window.

    With ``window=None`` the earliest contiguous stretch of samples whose mode
    amplitude sits in [10*noise floor, 1e-2*baseline] is used, keeping the fit
    inside the linear regime.
    """
    states = list(states)
    if not states:
        raise WindowTooShortError("no samples supplied")
    times = np.array([s.t for s in states])
    projs = np.array([mode_projection(s, k) for s in states])

    if window is not None:
        t0, t1 = float(window[0]), float(window[1])
        sel = (times >= t0) & (times <= t1)
    else:
        mode = cosine_mode(states[0].grid, k)
        norm_sq = float((mode * mode).sum()) * states[0].grid.cell_volume
        amps = np.abs(projs) / norm_sq
        baseline = mean_value(states[0].rho_a)
        ok = (amps >= 10.0 * NOISE_FLOOR) & (amps <= 1e-2 * baseline)
        sel = np.zeros_like(ok)
        start = None
        for i, good in enumerate(ok):
            if good and start is None:
                start = i
            if (not good or i == len(ok) - 1) and start is not None:
                end = i + 1 if good else i
                if end - start >= MIN_FIT_SAMPLES:
                    sel[start:end] = True
                    break
                start = None
    if int(sel.sum()) < MIN_FIT_SAMPLES:
        raise WindowTooShortError(
            f"need at least {MIN_FIT_SAMPLES} samples in the window, "
            f"got {int(sel.sum())}")
    p = projs[sel]
    if np.any(np.abs(p) < NOISE_FLOOR):
        raise SignalBelowNoiseError(
            f"mode projection at roundoff level (|p| < {NOISE_FLOOR})")
    slope = np.polyfit(times[sel], np.log(np.abs(p)), 1)[0]
    return float(slope)


def flatness_check(state: SystemState, tol: float) -> FlatnessReport:
    """True iff max-min of each density is within tol (constant steady state)."""
    sa = float(state.rho_a.values.max() - state.rho_a.values.min())
    sb = float(state.rho_b.values.max() - state.rho_b.values.min())
    return FlatnessReport(flat=(sa <= tol and sb <= tol), spread_a=sa, spread_b=sb)
