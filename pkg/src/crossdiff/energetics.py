"""Discrete energies, dissipation rates, relative entropy, and monitors.

Two Lyapunov functionals are evaluated: the natural energy with density
``h = ra*log(ra) - ra + rb*log(rb) - rb + kappa*ra*rb`` and the
Maxwell-Boltzmann entropy (same without the coupling term). Their
dissipation rates are face-based quadratures of

  d0 * [ ra*|grad(log ra + kappa*rb)|^2 + rb*|grad(log rb + kappa*ra)|^2 ]

and

  4*d0 * [ s*|grad(sqrt(ra)+sqrt(rb))|^2
           + (1-s)*(|grad sqrt(ra)|^2 + |grad sqrt(rb)|^2) ],
  s = kappa*sqrt(ra*rb) at the interface,

with interface values by arithmetic means and gradients taken of the
pointwise-transformed fields (transform, then difference), which avoids 0/0
at vacuum. The MB rate loses its sign where kappa^2*ra*rb > 1.

Dissipations are instantaneous functions of the state; matching them against
finite differences of the energies along a trajectory is a first-order-in-dt
consistency check, not an exact discrete identity.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np
from scipy.special import xlogy

from .errors import NonpositiveSteadyStateError
from .grid import Field, integrate_cells
from .model import ModelParams, SystemState, supercritical_fraction

LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class EnergyReport:
    """One diagnostic row; field order matches the time-series CSV header."""

    t: float
    mass_a: float
    mass_b: float
    energy_h: float
    energy_mb: float
    diss_h: float
    diss_mb: float
    rel_entropy: float
    supercrit_frac: float
    prod_l32: float
    linf_to_ss: float

    def as_row(self) -> tuple[float, ...]:
        return astuple(self)


CSV_HEADER = ("t,mass_a,mass_b,energy_h,energy_mb,diss_h,diss_mb,"
              "rel_entropy,supercrit_frac,prod_l32,linf_to_ss")


def _mb_density(ra: np.ndarray, rb: np.ndarray) -> np.ndarray:
    return xlogy(ra, ra) - ra + xlogy(rb, rb) - rb


def energy_h(state: SystemState, params: ModelParams) -> float:
    """Natural energy; 0*log(0) = 0 by convention."""
    ra, rb = state.rho_a.values, state.rho_b.values
    h = _mb_density(ra, rb) + params.kappa * ra * rb
    return integrate_cells(Field(state.grid, h))


def energy_mb(state: SystemState) -> float:
    """Maxwell-Boltzmann entropy (natural energy without the coupling term)."""
    ra, rb = state.rho_a.values, state.rho_b.values
    return integrate_cells(Field(state.grid, _mb_density(ra, rb)))


def _axis_grad(v: np.ndarray, axis: int, h: float) -> np.ndarray:
    return np.diff(v, axis=axis) / h


def _axis_mean(v: np.ndarray, axis: int) -> np.ndarray:
    lo = [slice(None)] * v.ndim
    hi = [slice(None)] * v.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (v[tuple(lo)] + v[tuple(hi)])


def dissipation_h(state: SystemState, params: ModelParams) -> float:
    """Instantaneous decay rate of the natural energy; a sum of nonnegatively
    weighted squares, so >= 0 up to roundoff for every state."""
    g = state.grid
    ra, rb = state.rho_a.values, state.rho_b.values
    kap = params.kappa
    wa = np.log(np.maximum(ra, LOG_FLOOR)) + kap * rb
    wb = np.log(np.maximum(rb, LOG_FLOOR)) + kap * ra
    total = 0.0
    for axis in range(g.dim):
        h = g.spacing[axis]
        gwa = _axis_grad(wa, axis, h)
        gwb = _axis_grad(wb, axis, h)
        ma = _axis_mean(ra, axis)
        mb = _axis_mean(rb, axis)
        total += float((ma * gwa * gwa + mb * gwb * gwb).sum())
    return params.d0 * total * g.cell_volume


def dissipation_mb(state: SystemState, params: ModelParams) -> float:
    """Instantaneous decay rate of the MB entropy; sign-indefinite where the
    interface value of kappa*sqrt(ra*rb) exceeds 1."""
    g = state.grid
    sa = np.sqrt(state.rho_a.values)
    sb = np.sqrt(state.rho_b.values)
    kap = params.kappa
    total = 0.0
    for axis in range(g.dim):
        h = g.spacing[axis]
        ga = _axis_grad(sa, axis, h)
        gb = _axis_grad(sb, axis, h)
        s = kap * _axis_mean(sa, axis) * _axis_mean(sb, axis)
        gsum = ga + gb
        total += float((s * gsum * gsum + (1.0 - s) * (ga * ga + gb * gb)).sum())
    return 4.0 * params.d0 * total * g.cell_volume


def relative_entropy(state: SystemState, ss: tuple[float, float],
                     params: ModelParams) -> float:
    """Bregman gap of the energy density around the constant state ``ss``;
    zero iff the state equals ``ss`` (for admissible masses)."""
    ra_inf, rb_inf = float(ss[0]), float(ss[1])
    if not (ra_inf > 0.0 and rb_inf > 0.0):
        raise NonpositiveSteadyStateError(
            f"steady-state densities must be positive, got {ss}")
    ra, rb = state.rho_a.values, state.rho_b.values
    hstar = (xlogy(ra, ra / ra_inf) + xlogy(rb, rb / rb_inf)
             + (ra_inf - ra) + (rb_inf - rb)
             + params.kappa * (ra - ra_inf) * (rb - rb_inf))
    return integrate_cells(Field(state.grid, hstar))


def apriori_monitors(state: SystemState) -> tuple[float, float]:
    """(product L^{3/2} cell norm, integral of |rho log rho| over both species)."""
    ra, rb = state.rho_a.values, state.rho_b.values
    prod = ra * rb
    l32 = integrate_cells(Field(state.grid, prod * np.sqrt(prod))) ** (2.0 / 3.0)
    logs = integrate_cells(
        Field(state.grid, np.abs(xlogy(ra, ra)) + np.abs(xlogy(rb, rb))))
    return l32, logs


def make_report(state: SystemState, params: ModelParams,
                ss: tuple[float, float]) -> EnergyReport:
    """Assemble the full diagnostic row for one instant."""
    ra, rb = state.rho_a.values, state.rho_b.values
    prod_l32, _ = apriori_monitors(state)
    linf = max(float(np.max(np.abs(ra - ss[0]))), float(np.max(np.abs(rb - ss[1]))))
    return EnergyReport(
        t=state.t,
        mass_a=integrate_cells(state.rho_a),
        mass_b=integrate_cells(state.rho_b),
        energy_h=energy_h(state, params),
        energy_mb=energy_mb(state),
        diss_h=dissipation_h(state, params),
        diss_mb=dissipation_mb(state, params),
        rel_entropy=relative_entropy(state, ss, params),
        supercrit_frac=supercritical_fraction(state, params),
        prod_l32=prod_l32,
        linf_to_ss=linf,
    )
