"""Model parameters, states, and flux assembly for both systems.

The reduced system evolves densities (rho_a, rho_b) with transport flux
``-d0*(grad rho_i + kappa*rho_i*grad rho_j)``, ``kappa = 2*beta*c``. The
four-field parent system couples densities to marking fields (g_a, g_b)
with coefficient ``2*beta`` against the rival marking gradient, and relaxes
markings toward ``c*rho`` on a time scale ``epsilon``.

Two parameter scalings are supported: ``physical`` (d0 defaults to 1/4,
kappa free) and ``scaled`` (kappa = 1 and d0 = 1, the convention under
which the energy analysis is usually written).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import FaceFluxes, Field, GridSpec, require_same_grid

SCALINGS = ("physical", "scaled")


@dataclass(frozen=True)
class ModelParams:
    """Marking-avoidance strength beta, production rate c, diffusion prefactor d0."""

    beta: float
    c: float
    d0: float = 0.25
    scaling: str = "physical"

    def __post_init__(self):
        for name in ("beta", "c", "d0"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (v > 0.0) or not np.isfinite(v):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if self.scaling not in SCALINGS:
            raise ValueError(f"scaling must be one of {SCALINGS}, got {self.scaling!r}")
        if self.scaling == "scaled":
            if abs(self.kappa - 1.0) > 1e-12:
                raise ValueError(f"scaled mode requires 2*beta*c = 1, got {self.kappa}")
            if self.d0 != 1.0:
                raise ValueError(f"scaled mode requires d0 = 1, got {self.d0}")

    @property
    def kappa(self) -> float:
        """Coupling 2*beta*c carried by the reduced cross term."""
        return 2.0 * self.beta * self.c

    @classmethod
    def scaled(cls, beta: float = 0.5, c: float = 1.0) -> "ModelParams":
        return cls(beta=beta, c=c, d0=1.0, scaling="scaled")


@dataclass(frozen=True)
class SystemState:
    """Density pair at one instant. Nonnegativity is the integrator's contract:
    constructing a state with negative values is allowed (intermediate RHS
    probing), letting one pass out of a step is a solver error."""

    t: float
    rho_a: Field
    rho_b: Field

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        require_same_grid(self.rho_a, self.rho_b)

    @property
    def grid(self) -> GridSpec:
        return self.rho_a.grid


@dataclass(frozen=True)
class FullState:
    """Densities plus marking fields; epsilon = 1 is the literal parent system."""

    t: float
    rho_a: Field
    rho_b: Field
    g_a: Field
    g_b: Field
    epsilon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        require_same_grid(self.rho_a, self.rho_b, self.g_a, self.g_b)
        if not (self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def grid(self) -> GridSpec:
        return self.rho_a.grid


def cross_flux(rho_self: Field, drive: Field, params: ModelParams) -> FaceFluxes:
    """Transport flux -d0*(grad rho_self + kappa*iface(rho_self)*grad drive).

    Interface density is the arithmetic mean of the adjacent cells; boundary
    faces are zero.
    """
    g = require_same_grid(rho_self, drive)
    k = kernels.get_backend()
    d0, kap = params.d0, params.kappa
    if g.dim == 1:
        return FaceFluxes(g, (k.cross_flux_1d(rho_self.values, drive.values,
                                              g.spacing[0], d0, kap),))
    fx = k.cross_flux_2d_x(rho_self.values, drive.values, g.spacing[0], d0, kap)
    fy = k.cross_flux_2d_y(rho_self.values, drive.values, g.spacing[1], d0, kap)
    return FaceFluxes(g, (fx, fy))


def rhs_reduced(state: SystemState, params: ModelParams) -> tuple[Field, Field]:
    """Density tendencies: divergence of the negated cross fluxes, so a pure
    diffusion limit returns +d0*Lap(rho). Each output telescopes to zero mass."""
    g = state.grid
    k = kernels.get_backend()
    d0, kap = params.d0, params.kappa
    if g.dim == 1:
        ta, tb = k.rhs_pair_1d(state.rho_a.values, state.rho_b.values,
                               g.spacing[0], d0, kap)
    else:
        ta, tb = k.rhs_pair_2d(state.rho_a.values, state.rho_b.values,
                               g.spacing[0], g.spacing[1], d0, kap)
    return Field(g, ta), Field(g, tb)


def rhs_full(state: FullState, params: ModelParams) -> tuple[Field, Field, Field, Field]:
    """Tendencies of (rho_a, rho_b, g_a, g_b); density coupling is 2*beta
    against the rival marking gradient, markings relax as (c*rho - g)/epsilon."""
    g = state.grid
    k = kernels.get_backend()
    two_beta = 2.0 * params.beta
    if g.dim == 1:
        ta, tb = k.full_density_rhs_1d(state.rho_a.values, state.rho_b.values,
                                       state.g_a.values, state.g_b.values,
                                       g.spacing[0], params.d0, two_beta)
    else:
        ta, tb = k.full_density_rhs_2d(state.rho_a.values, state.rho_b.values,
                                       state.g_a.values, state.g_b.values,
                                       g.spacing[0], g.spacing[1], params.d0, two_beta)
    ma = (params.c * state.rho_a.values - state.g_a.values) / state.epsilon
    mb = (params.c * state.rho_b.values - state.g_b.values) / state.epsilon
    return Field(g, ta), Field(g, tb), Field(g, ma), Field(g, mb)


def reduce_full_to_two(state: FullState) -> SystemState:
    """Drop the marking fields (quasi-steady reduction keeps the densities)."""
    return SystemState(t=state.t, rho_a=state.rho_a, rho_b=state.rho_b)


def lift_two_to_full(state: SystemState, params: ModelParams,
                     epsilon: float = 1.0) -> FullState:
    """Attach equilibrated markings g_i = c*rho_i."""
    g = state.grid
    return FullState(t=state.t, rho_a=state.rho_a, rho_b=state.rho_b,
                     g_a=Field(g, params.c * state.rho_a.values),
                     g_b=Field(g, params.c * state.rho_b.values),
                     epsilon=epsilon)


def supercritical_fraction(state: SystemState, params: ModelParams) -> float:
    """Volume fraction where kappa^2*rho_a*rho_b > 1 (normal ellipticity lost)."""
    kap = params.kappa
    prod = (kap * kap) * state.rho_a.values * state.rho_b.values
    return float(np.count_nonzero(prod > 1.0)) / state.grid.n_cells
