"""The extrapolation space X_{-1} in representative coordinates.

An element A_{-1} f of X_{-1} is stored through its preimage f in X_0, for the
shifted generator A - sigma. The norm is then exact: ||A_{-1} f||_{-1} = ||f||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ShiftRequiredError
from .funcspace import Function, Grid, default_grid, sup_norm, tabulate
from .quadrature import QuadratureSpec
from .resolvent import ResolventRequest, resolve
from .scales import (
    FavardEstimate, MembershipResult, ProbeSchedule, _buc_verdict, favard_sg, little_holder,
    modulus_profile,
)
from .semigroups import HEAT_RADIUS, SemigroupDescriptor, apply


def _reach(sg: SemigroupDescriptor, t_max: float) -> float:
    """How far from x the evaluation of T(t)f(x) looks, for t <= t_max."""
    if sg.kind == "translation":
        return t_max
    if sg.kind == "heat":
        return HEAT_RADIUS * math.sqrt(2.0 * t_max)
    return 0.0


def _swept(sg: SemigroupDescriptor, f: Function, sched: ProbeSchedule, grid: Grid) -> Function:
    """f tabulated on ``grid`` widened by the reach of the sweep."""
    r = _reach(sg, sched.t_max)
    return tabulate(f, grid.extended(r, r))


def _require_shift(sg: SemigroupDescriptor) -> None:
    if not sg.omega_eff < 0:
        raise ShiftRequiredError(
            f"{sg.label}: omega - sigma = {sg.omega_eff} must be negative; raise sigma")


@dataclass(frozen=True, eq=False)
class ExtrapolatedVector:
    """The element (A - sigma) rep of X_{-1}."""

    rep: Function
    sg: SemigroupDescriptor

    def __post_init__(self):
        _require_shift(self.sg)

    def norm(self, grid: Grid | None = None) -> float:
        return sup_norm(self.rep, grid)

    def _same_space(self, other: ExtrapolatedVector) -> None:
        if other.sg != self.sg:
            raise DomainError("extrapolated vectors from different semigroups or shifts")

    def __add__(self, other: ExtrapolatedVector) -> ExtrapolatedVector:
        self._same_space(other)
        return ExtrapolatedVector(self.rep + other.rep, self.sg)

    def __sub__(self, other: ExtrapolatedVector) -> ExtrapolatedVector:
        self._same_space(other)
        return ExtrapolatedVector(self.rep - other.rep, self.sg)

    def scale(self, c: float) -> ExtrapolatedVector:
        return ExtrapolatedVector(self.rep.scale(c), self.sg)

    def in_closure(self, sched: ProbeSchedule | None = None, grid: Grid | None = None) -> bool:
        """True when rep is certified strongly continuous, i.e. the vector lies in the closure of X_0."""
        sched = ProbeSchedule() if sched is None else sched
        grid = default_grid() if grid is None else grid
        rep = _swept(self.sg, self.rep, sched, grid)
        verdict, _ = _buc_verdict(modulus_profile(self.sg, rep, sched.t_grid, grid, shifted=True))
        return verdict == "yes"

    def as_dict(self, grid: Grid | None = None) -> dict:
        return {"sg": self.sg.label, "sigma": self.sg.sigma, "rep_label": self.rep.label,
                "norm": self.norm(grid)}


def a_inverse(sg: SemigroupDescriptor, f: Function,
              quad: QuadratureSpec | None = None) -> Function:
    """(A - sigma)^{-1} f = -int_0^inf e^{-sigma s} T(s) f ds."""
    _require_shift(sg)
    quad = QuadratureSpec() if quad is None else quad
    r = resolve(sg, ResolventRequest(sg.sigma, quad), f)
    return Function(lambda x: -r(x), r.bound_hint, f"Ainv{f.label}")


def embed(sg: SemigroupDescriptor, g: Function,
          quad: QuadratureSpec | None = None) -> ExtrapolatedVector:
    """g in X_0 viewed in X_{-1}."""
    return ExtrapolatedVector(a_inverse(sg, g, quad), sg)


def ext_apply(sg: SemigroupDescriptor, t: float, x: ExtrapolatedVector) -> ExtrapolatedVector:
    """T_{-1}(t) x for the shifted family, acting on the representative."""
    if x.sg != sg:
        raise DomainError("vector belongs to a different semigroup or shift")
    return ExtrapolatedVector(apply(sg, t, x.rep, shifted=True), sg)


def favard0_norm(sg: SemigroupDescriptor, g: Function, sched: ProbeSchedule | None = None,
                 quad: QuadratureSpec | None = None, grid: Grid | None = None) -> FavardEstimate:
    """||g||_{F_0}: the shifted Favard-1 norm of (A - sigma)^{-1} g.

    The representative is tabulated once (cubic spline) so the t-sweep does
    not repeat the resolvent quadrature.
    """
    sched = ProbeSchedule() if sched is None else sched
    grid = default_grid() if grid is None else grid
    rep = _swept(sg, a_inverse(sg, g, quad), sched, grid)
    return favard_sg(sg, rep, 1.0, sched, grid, shifted=True)


def favard_ext(x: ExtrapolatedVector, alpha: float, sched: ProbeSchedule | None = None,
               grid: Grid | None = None) -> FavardEstimate:
    """Norm of x in F_{alpha-1}, read off the representative in F_alpha.

    The representative is evaluated directly: a spline would hide any
    roughness below the grid spacing, which is exactly what small t probes.
    """
    return favard_sg(x.sg, x.rep, alpha, sched, grid, shifted=True)


def little_holder_ext(x: ExtrapolatedVector, alpha: float, sched: ProbeSchedule | None = None,
                      grid: Grid | None = None) -> MembershipResult:
    """Membership of x in the little space X_{alpha-1}."""
    sched = ProbeSchedule() if sched is None else sched
    prof = modulus_profile(x.sg, x.rep, sched.t_grid, grid, shifted=True)
    return little_holder(x.sg, x.rep, alpha, sched, profile=prof)
