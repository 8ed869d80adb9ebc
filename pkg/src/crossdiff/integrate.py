"""Time integration and the simulation driver.

Explicit Euler steps under a CFL bound built from the diffusion-matrix
eigenvalue overestimate ``Lambda = 1 + kappa*max(rho)`` (safe in the
supercritical region too); an IMEX variant treats the self-diffusion
implicitly (tridiagonal solve in 1D, conjugate gradients in 2D) with the
cross term explicit. The four-field system advances markings by their exact
exponential relaxation against the frozen densities, so epsilon far below dt
costs nothing.

Densities are never clipped: any value below ``-tol_negative`` aborts the
run with the failing time and cell attached. A run is a pure function of its
configuration; identical configs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .energetics import EnergyReport, make_report
from .errors import (NegativeDensityError, NonFiniteError, SolverDivergedError)
from .grid import Field, GridSpec, mean_value
from .kernels import numpy_backend as _scan_backend
from .kernels.numpy_backend import (FIELD_NAMES, STATUS_NEGATIVE, STATUS_NONFINITE,
                                    STATUS_OK)
from .model import (FullState, ModelParams, SystemState, lift_two_to_full,
                    reduce_full_to_two)

SCHEMES = ("explicit", "imex")
IC_KINDS = ("uniform", "gaussian_bump", "two_gaussians_2d")


# ---------------------------------------------------------------------------
# configuration types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpeciesInit:
    """Initial profile of one species: baseline + amplitude*exp(-|x-center|^2/width)."""

    kind: str
    baseline: float
    amplitude: float = 0.0
    center: tuple[float, ...] = ()
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in IC_KINDS:
            raise ValueError(f"kind must be one of {IC_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "baseline", float(self.baseline))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))
        if self.baseline < 0.0 or self.amplitude < 0.0:
            raise ValueError("baseline and amplitude must be nonnegative")
        if not (self.width > 0.0):
            raise ValueError("width must be positive")

    def evaluate(self, grid: GridSpec) -> Field:
        if self.kind == "uniform":
            return Field.full(grid, self.baseline)
        center = self.center if self.center else (0.0,) * grid.dim
        if len(center) != grid.dim:
            raise ValueError(f"center has {len(center)} entries for a {grid.dim}D grid")
        meshes = grid.meshes()
        r2 = sum((x - c) ** 2 for x, c in zip(meshes, center))
        if self.kind == "gaussian_bump":
            vals = self.baseline + self.amplitude * np.exp(-r2 / self.width)
        else:  # two_gaussians_2d: mirrored pair at +-center
            r2m = sum((x + c) ** 2 for x, c in zip(meshes, center))
            vals = self.baseline + self.amplitude * (np.exp(-r2 / self.width)
                                                     + np.exp(-r2m / self.width))
        return Field(grid, vals)


@dataclass(frozen=True)
class InitialCondition:
    rho_a: SpeciesInit
    rho_b: SpeciesInit

    def build(self, grid: GridSpec) -> SystemState:
        return SystemState(t=0.0, rho_a=self.rho_a.evaluate(grid),
                           rho_b=self.rho_b.evaluate(grid))


@dataclass(frozen=True)
class StepperConfig:
    scheme: str = "explicit"
    cfl_safety: float = 0.4
    dt_max: float = math.inf
    dt_init: float | None = None  # defaults to dt_max

    tol_negative: float = 0.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.dt_init is None:
            object.__setattr__(self, "dt_init", self.dt_max)
        for name in ("cfl_safety", "dt_max", "dt_init", "tol_negative"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if not (self.dt_max > 0.0) or not (self.dt_init > 0.0):
            raise ValueError("dt_max and dt_init must be positive")
        if self.dt_init > self.dt_max:
            raise ValueError("dt_init must not exceed dt_max")
        if self.tol_negative < 0.0:
            raise ValueError("tol_negative must be nonnegative")


@dataclass(frozen=True)
class FullModelConfig:
    enabled: bool = False
    epsilon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if not (self.epsilon > 0.0):
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    params: ModelParams
    stepper: StepperConfig
    initial: InitialCondition
    t_end: float
    output_every: float
    snapshot_times: tuple[float, ...] = ()
    full_model: FullModelConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "output_every", float(self.output_every))
        object.__setattr__(self, "snapshot_times",
                           tuple(float(t) for t in self.snapshot_times))
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        if not (self.output_every > 0.0):
            raise ValueError("output_every must be positive")
        if self.t_end > 0.0 and self.output_every > self.t_end:
            raise ValueError("output_every must not exceed t_end")
        for t in self.snapshot_times:
            if not (0.0 <= t <= self.t_end):
                raise ValueError(f"snapshot time {t} outside [0, t_end]")


@dataclass
class RunResult:
    reports: list[EnergyReport]
    snapshots: list
    final_state: object
    steady: tuple[float, float]


# ---------------------------------------------------------------------------
# single steps
# ---------------------------------------------------------------------------

def cfl_dt(state: SystemState, params: ModelParams, cfg: StepperConfig) -> float:
    """Stable explicit step: safety*h_min^2 / (2*dim*d0*(1 + kappa*max rho)),
    clamped to dt_max. Identical arithmetic to the fused advance kernels."""
    g = state.grid
    lam = 1.0 + params.kappa * max(float(state.rho_a.values.max()),
                                   float(state.rho_b.values.max()))
    hmin = min(g.spacing)
    dt = cfg.cfl_safety * hmin * hmin / (2.0 * float(g.dim) * params.d0 * lam)
    if dt > cfg.dt_max:
        dt = cfg.dt_max
    return dt


def _check_state(t: float, arrays, names, tol_neg: float):
    for name, arr in zip(names, arrays):
        status, idx = _scan_backend._scan_field(arr, tol_neg)
        if status == STATUS_NONFINITE:
            raise NonFiniteError(t, name, idx)
        if status == STATUS_NEGATIVE:
            raise NegativeDensityError(t, name, idx, float(arr.ravel()[idx]))


def step_explicit(state: SystemState, dt: float, params: ModelParams,
                  tol_negative: float = 0.0) -> SystemState:
    """Forward Euler; flux form, so species masses telescope exactly."""
    if not (dt > 0.0):
        raise ValueError("dt must be positive")
    g = state.grid
    k = kernels.get_backend()
    # overflow to inf is legal here; the post-step scan turns it into an error
    with np.errstate(over="ignore", invalid="ignore"):
        if g.dim == 1:
            ta, tb = k.rhs_pair_1d(state.rho_a.values, state.rho_b.values,
                                   g.spacing[0], params.d0, params.kappa)
        else:
            ta, tb = k.rhs_pair_2d(state.rho_a.values, state.rho_b.values,
                                   g.spacing[0], g.spacing[1], params.d0,
                                   params.kappa)
        new_a = state.rho_a.values + dt * ta
        new_b = state.rho_b.values + dt * tb
    t_new = state.t + dt
    _check_state(t_new, (new_a, new_b), FIELD_NAMES[:2], tol_negative)
    return SystemState(t=t_new, rho_a=Field(g, new_a), rho_b=Field(g, new_b))


def _cg_helmholtz(b: np.ndarray, alpha: float, hx: float, hy: float, backend,
                  tol: float, maxiter: int, t_fail: float) -> np.ndarray:
    """CG on the SPD operator x -> x - alpha*Lap(x), relative-residual stop."""
    bnorm = math.sqrt(float(np.vdot(b, b).real))
    if bnorm == 0.0:
        return np.zeros_like(b)
    x = b.copy()
    r = b - (x - alpha * backend.laplacian_2d(x, hx, hy))
    p = r.copy()
    rs = float(np.vdot(r, r).real)
    for _ in range(maxiter):
        if math.sqrt(rs) <= tol * bnorm:
            return x
        ap = p - alpha * backend.laplacian_2d(p, hx, hy)
        a = rs / float(np.vdot(p, ap).real)
        x = x + a * p
        r = r - a * ap
        rs_new = float(np.vdot(r, r).real)
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise SolverDivergedError(
        f"CG exceeded {maxiter} iterations (relative residual "
        f"{math.sqrt(rs) / bnorm:.3e})", time=t_fail)


def step_imex(state: SystemState, dt: float, params: ModelParams,
              tol_negative: float = 0.0, cg_tol: float = 1e-12,
              cg_maxiter: int | None = None) -> SystemState:
    """Backward Euler on the self-diffusion, forward Euler on the cross term."""
    if not (dt > 0.0):
        raise ValueError("dt must be positive")
    g = state.grid
    k = kernels.get_backend()
    ra, rb = state.rho_a.values, state.rho_b.values
    alpha = dt * params.d0
    t_new = state.t + dt
    if g.dim == 1:
        h = g.spacing[0]
        ba = ra + dt * k.cross_only_rhs_1d(ra, rb, h, params.d0, params.kappa)
        bb = rb + dt * k.cross_only_rhs_1d(rb, ra, h, params.d0, params.kappa)
        new_a = k.thomas_helmholtz_1d(ba, alpha, h)
        new_b = k.thomas_helmholtz_1d(bb, alpha, h)
    else:
        hx, hy = g.spacing
        maxiter = cg_maxiter if cg_maxiter is not None else 10 * g.n_cells
        ba = ra + dt * k.cross_only_rhs_2d(ra, rb, hx, hy, params.d0, params.kappa)
        bb = rb + dt * k.cross_only_rhs_2d(rb, ra, hx, hy, params.d0, params.kappa)
        new_a = _cg_helmholtz(ba, alpha, hx, hy, k, cg_tol, maxiter, t_new)
        new_b = _cg_helmholtz(bb, alpha, hx, hy, k, cg_tol, maxiter, t_new)
    _check_state(t_new, (new_a, new_b), FIELD_NAMES[:2], tol_negative)
    return SystemState(t=t_new, rho_a=Field(g, new_a), rho_b=Field(g, new_b))


def step_full(state: FullState, dt: float, params: ModelParams,
              tol_negative: float = 0.0) -> FullState:
    """Densities by forward Euler; markings by exact exponential relaxation
    toward c*rho with rho frozen at the step start."""
    if not (dt > 0.0):
        raise ValueError("dt must be positive")
    g = state.grid
    k = kernels.get_backend()
    two_beta = 2.0 * params.beta
    ra, rb = state.rho_a.values, state.rho_b.values
    ga, gb = state.g_a.values, state.g_b.values
    if g.dim == 1:
        ta, tb = k.full_density_rhs_1d(ra, rb, ga, gb, g.spacing[0],
                                       params.d0, two_beta)
    else:
        ta, tb = k.full_density_rhs_2d(ra, rb, ga, gb, g.spacing[0], g.spacing[1],
                                       params.d0, two_beta)
    decay = math.exp(-dt / state.epsilon)
    c = params.c
    new_ga = (c * ra) + (ga - (c * ra)) * decay
    new_gb = (c * rb) + (gb - (c * rb)) * decay
    new_a = ra + dt * ta
    new_b = rb + dt * tb
    t_new = state.t + dt
    _check_state(t_new, (new_a, new_b, new_ga, new_gb), FIELD_NAMES, tol_negative)
    return FullState(t=t_new, rho_a=Field(g, new_a), rho_b=Field(g, new_b),
                     g_a=Field(g, new_ga), g_b=Field(g, new_gb),
                     epsilon=state.epsilon)


# ---------------------------------------------------------------------------
# segment advancing (mutates raw arrays; used by the driver)
# ---------------------------------------------------------------------------

def _raise_for_status(status, fid, idx, bad_t, arrays):
    if status == STATUS_NONFINITE:
        raise NonFiniteError(bad_t, FIELD_NAMES[fid], idx)
    if status == STATUS_NEGATIVE:
        raise NegativeDensityError(bad_t, FIELD_NAMES[fid], idx,
                                   float(arrays[fid].ravel()[idx]))


def _advance_reduced(arrs, grid, params, stepper, t, t_stop, dt_first):
    k = kernels.get_backend()
    ra, rb = arrs
    if grid.dim == 1:
        out = k.advance_explicit_1d(ra, rb, grid.spacing[0], params.d0, params.kappa,
                                    t, t_stop, stepper.cfl_safety, stepper.dt_max,
                                    dt_first, stepper.tol_negative)
    else:
        out = k.advance_explicit_2d(ra, rb, grid.spacing[0], grid.spacing[1],
                                    params.d0, params.kappa, t, t_stop,
                                    stepper.cfl_safety, stepper.dt_max, dt_first,
                                    stepper.tol_negative)
    t, _steps, status, fid, idx, bad_t = out
    if status != STATUS_OK:
        _raise_for_status(status, fid, idx, bad_t, arrs)
    return t


def _advance_full(arrs, grid, params, stepper, eps, t, t_stop, dt_first):
    k = kernels.get_backend()
    ra, rb, ga, gb = arrs
    two_beta = 2.0 * params.beta
    if grid.dim == 1:
        out = k.advance_full_1d(ra, rb, ga, gb, grid.spacing[0], params.d0,
                                params.kappa, two_beta, params.c, eps, t, t_stop,
                                stepper.cfl_safety, stepper.dt_max, dt_first,
                                stepper.tol_negative)
    else:
        out = k.advance_full_2d(ra, rb, ga, gb, grid.spacing[0], grid.spacing[1],
                                params.d0, params.kappa, two_beta, params.c, eps,
                                t, t_stop, stepper.cfl_safety, stepper.dt_max,
                                dt_first, stepper.tol_negative)
    t, _steps, status, fid, idx, bad_t = out
    if status != STATUS_OK:
        _raise_for_status(status, fid, idx, bad_t, arrs)
    return t


def _advance_imex(arrs, grid, params, stepper, t, t_stop, dt_first):
    ra, rb = arrs
    first = math.isfinite(dt_first)
    while t < t_stop:
        state = SystemState(t=t, rho_a=Field(grid, ra), rho_b=Field(grid, rb))
        dt = cfl_dt(state, params, stepper)
        if first and dt > stepper.dt_init:
            dt = stepper.dt_init
        first = False
        clamped = dt >= t_stop - t
        if clamped:
            dt = t_stop - t
        state = step_imex(state, dt, params, tol_negative=stepper.tol_negative)
        ra[:] = state.rho_a.values
        rb[:] = state.rho_b.values
        t = t_stop if clamped else t + dt
    return t


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def _report_times(t_end: float, every: float) -> list[float]:
    n = int(math.floor(t_end / every + 1e-9))
    times = []
    for i in range(1, n + 1):
        ti = i * every
        times.append(t_end if ti > t_end else ti)
    if not times or times[-1] != t_end:
        times.append(t_end)
    return times


def run_simulation(cfg: RunConfig) -> RunResult:
    """Integrate from t=0 to t_end; reports at every output interval, state
    snapshots at t=0 and each requested time (hit exactly by dt clamping)."""
    params, stepper = cfg.params, cfg.stepper
    state0 = cfg.initial.build(cfg.grid)
    full = cfg.full_model is not None and cfg.full_model.enabled
    if full:
        state0 = lift_two_to_full(state0, params, cfg.full_model.epsilon)
    ss = (mean_value(state0.rho_a), mean_value(state0.rho_b))

    def reduced(s):
        return reduce_full_to_two(s) if full else s

    reports = [make_report(reduced(state0), params, ss)]
    snapshots = [state0]
    if cfg.t_end == 0.0:
        return RunResult(reports, snapshots, state0, ss)

    report_at = set(_report_times(cfg.t_end, cfg.output_every))
    snap_at = set(t for t in cfg.snapshot_times if t > 0.0)
    boundaries = sorted(report_at | snap_at | {cfg.t_end})

    if full:
        arrs = [state0.rho_a.values.copy(), state0.rho_b.values.copy(),
                state0.g_a.values.copy(), state0.g_b.values.copy()]
    else:
        arrs = [state0.rho_a.values.copy(), state0.rho_b.values.copy()]

    t = 0.0
    dt_first = stepper.dt_init
    state = state0
    for tb in boundaries:
        if full:
            t = _advance_full(arrs, cfg.grid, params, stepper,
                              cfg.full_model.epsilon, t, tb, dt_first)
            state = FullState(t=t, rho_a=Field(cfg.grid, arrs[0]),
                              rho_b=Field(cfg.grid, arrs[1]),
                              g_a=Field(cfg.grid, arrs[2]),
                              g_b=Field(cfg.grid, arrs[3]),
                              epsilon=cfg.full_model.epsilon)
        elif stepper.scheme == "imex":
            t = _advance_imex(arrs, cfg.grid, params, stepper, t, tb, dt_first)
            state = SystemState(t=t, rho_a=Field(cfg.grid, arrs[0]),
                                rho_b=Field(cfg.grid, arrs[1]))
        else:
            t = _advance_reduced(arrs, cfg.grid, params, stepper, t, tb, dt_first)
            state = SystemState(t=t, rho_a=Field(cfg.grid, arrs[0]),
                                rho_b=Field(cfg.grid, arrs[1]))
        dt_first = math.inf
        if tb in report_at:
            reports.append(make_report(reduced(state), params, ss))
        if tb in snap_at:
            snapshots.append(state)
    return RunResult(reports, snapshots, state, ss)


def sample_trajectory(state: SystemState, params: ModelParams,
                      stepper: StepperConfig, times) -> list[SystemState]:
    """Explicit-scheme helper: advance a (possibly hand-built) state and
    collect copies at the given times; times must be nondecreasing >= state.t."""
    times = [float(x) for x in times]
    out = []
    arrs = [state.rho_a.values.copy(), state.rho_b.values.copy()]
    t = state.t
    dt_first = stepper.dt_init
    grid = state.grid
    for tb in times:
        if tb < t:
            raise ValueError("sample times must be nondecreasing and >= state.t")
        if tb > t:
            t = _advance_reduced(arrs, grid, params, stepper, t, tb, dt_first)
            dt_first = math.inf
        out.append(SystemState(t=t, rho_a=Field(grid, arrs[0]),
                               rho_b=Field(grid, arrs[1])))
    return out
