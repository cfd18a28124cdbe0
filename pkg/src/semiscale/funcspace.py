"""Functions on the real line, uniform grids and the sup/compact/Hölder seminorms.

Elements of C_b(R) are stored as closed-form evaluation rules so that shifted
and off-grid evaluations carry no interpolation error. Every norm below is a
grid maximum, hence a lower bound for the true supremum.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DomainError, EvaluationError

DEFAULT_WINDOW = 40.0
DEFAULT_N = 16001
WIDE_WINDOW = 160.0
INNER_FRACTION = 0.75


@dataclass(frozen=True, eq=False)
class Function:
    """An evaluable real function with an optional known sup bound.

    ``eval`` must accept a float ndarray and return an array of the same shape
    (a scalar is broadcast).
    """

    eval: Callable[[np.ndarray], np.ndarray]
    bound_hint: float | None = None
    label: str = "f"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.eval(x), dtype=float), x.shape)

    def scale(self, c: float) -> Function:
        c = float(c)
        bound = None if self.bound_hint is None else abs(c) * self.bound_hint
        return Function(lambda x: c * self(x), bound, f"{c!r}*{self.label}")

    def __mul__(self, c):
        if isinstance(c, Function):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self) -> Function:
        return self.scale(-1.0)

    def __add__(self, other: Function) -> Function:
        return Function(
            lambda x: self(x) + other(x),
            _sum_bound(self.bound_hint, other.bound_hint),
            f"({self.label}+{other.label})",
        )

    def __sub__(self, other: Function) -> Function:
        return Function(
            lambda x: self(x) - other(x),
            _sum_bound(self.bound_hint, other.bound_hint),
            f"({self.label}-{other.label})",
        )


def _sum_bound(a, b):
    if a is None or b is None:
        return None
    return a + b


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [a, b] with n points, endpoints included."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise DomainError(f"grid needs finite a < b, got [{self.a}, {self.b}]")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"grid needs an integer n >= 2, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.a, self.b, self.n)
        pts.flags.writeable = False
        return pts

    def inner_mask(self, fraction: float = INNER_FRACTION) -> np.ndarray:
        """Mask of the points in the central ``fraction`` of the window."""
        mid = 0.5 * (self.a + self.b)
        half = 0.5 * fraction * (self.b - self.a)
        return np.abs(self.points - mid) <= half + 1e-12 * half

    def extended(self, left: float, right: float) -> Grid:
        """Same spacing, widened by at least ``left``/``right`` on each side."""
        h = self.h
        nl = int(math.ceil(max(left, 0.0) / h - 1e-9))
        nr = int(math.ceil(max(right, 0.0) / h - 1e-9))
        return Grid(self.a - nl * h, self.b + nr * h, self.n + nl + nr)

    def as_list(self) -> list:
        return [self.a, self.b, self.n]


@dataclass(frozen=True)
class CompactSet:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.a > self.b:
            raise DomainError(f"compact set needs finite a <= b, got [{self.a}, {self.b}]")

    def mask(self, points: np.ndarray) -> np.ndarray:
        return (points >= self.a) & (points <= self.b)

    def as_list(self) -> list:
        return [self.a, self.b]


DEFAULT_KS = (CompactSet(-5.0, 5.0), CompactSet(-10.0, 10.0), CompactSet(-20.0, 20.0))


def _grid_n(window: float) -> int:
    n = DEFAULT_N
    env = os.environ.get("SEMISCALE_GRID_N")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"SEMISCALE_GRID_N must be an integer, got {env!r}") from exc
        if n < 2:
            raise ConfigError(f"SEMISCALE_GRID_N must be >= 2, got {n}")
    # keep the default spacing when widening the window
    return int(round((n - 1) * window / DEFAULT_WINDOW)) + 1


def default_grid() -> Grid:
    """[-40, 40] with 16001 points (``SEMISCALE_GRID_N`` overrides n)."""
    return Grid(-DEFAULT_WINDOW, DEFAULT_WINDOW, _grid_n(DEFAULT_WINDOW))


def wide_grid() -> Grid:
    """[-160, 160] at the default spacing; used where behaviour at infinity matters."""
    return Grid(-WIDE_WINDOW, WIDE_WINDOW, _grid_n(WIDE_WINDOW))


def sample(f: Function, g: Grid | np.ndarray) -> np.ndarray:
    """Values of ``f`` at the grid points; raises if any value is not finite."""
    x = g.points if isinstance(g, Grid) else np.asarray(g, dtype=float)
    v = np.array(f(x), dtype=float)
    bad = ~np.isfinite(v)
    if bad.any():
        i = int(np.argmax(bad))
        raise EvaluationError(f.label, float(x.flat[i]), float(v.flat[i]))
    return v


def sup_norm(f: Function, g: Grid | None = None) -> float:
    g = default_grid() if g is None else g
    v = sample(f, g)
    return float(np.max(np.abs(v)))


def compact_seminorm(f: Function, K: CompactSet, density: int = 1001) -> float:
    """p_K(f) = max |f| over ``density`` uniform points of K."""
    if density < 1:
        raise DomainError("density must be positive")
    x = np.linspace(K.a, K.b, density) if K.b > K.a else np.array([K.a])
    return float(np.max(np.abs(sample(f, x))))


def holder_quotient(f: Function, alpha: float, g: Grid, lag_max: int = 1) -> float:
    """Max of |f(x)-f(y)|/|x-y|^alpha over grid pairs at index distance <= lag_max."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    v = sample(f, g)
    best = 0.0
    for k in range(1, min(int(lag_max), g.n - 1) + 1):
        d = np.max(np.abs(v[k:] - v[:-k]))
        best = max(best, float(d) / (k * g.h) ** alpha)
    return best


def from_samples(g: Grid, values: np.ndarray, label: str = "sampled") -> Function:
    """Piecewise-linear interpolant of grid samples; NaN outside [g.a, g.b]."""
    xs = g.points
    vals = np.array(values, dtype=float)
    if vals.shape != xs.shape:
        raise DomainError("sample count does not match grid")
    vals.flags.writeable = False
    slack = 1e-9 * g.h
    lo, hi = g.a - slack, g.b + slack

    def ev(x):
        out = np.interp(x, xs, vals)
        return np.where((x >= lo) & (x <= hi), out, np.nan)

    bound = float(np.max(np.abs(vals))) if vals.size else 0.0
    return Function(ev, bound, label)


def tabulate(f: Function, g: Grid, label: str | None = None) -> Function:
    """Cubic-spline interpolant of ``f`` on ``g``; NaN outside the grid.

    Trades an O(h^4) error for cheap evaluation of expensive functions.
    """
    vals = sample(f, g)
    spline = CubicSpline(g.points, vals, extrapolate=False)
    return Function(spline, float(np.max(np.abs(vals))), f.label if label is None else label)


# ---------------------------------------------------------------------------
# built-in function library


def zero() -> Function:
    return Function(lambda x: np.zeros_like(x), 0.0, "zero")


def constant(c: float) -> Function:
    c = float(c)
    return Function(lambda x: np.full_like(x, c), abs(c), f"const:{c!r}")


def sine() -> Function:
    return Function(np.sin, 1.0, "sin")


def cosine() -> Function:
    return Function(np.cos, 1.0, "cos")


def rational(beta: float = 1.0) -> Function:
    """x -> (1 + x^2)^(-beta)."""
    beta = float(beta)
    if beta < 0:
        raise DomainError("rational needs beta >= 0")
    return Function(lambda x: (1.0 + x * x) ** (-beta), 1.0, f"rational:{beta!r}")


def holder_bump(beta: float) -> Function:
    """x -> |sin x|^beta, exactly beta-Hölder at the zeros of sin."""
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise DomainError("holder_bump needs beta in (0, 1]")
    return Function(lambda x: np.abs(np.sin(x)) ** beta, 1.0, f"holder_bump:{beta!r}")


def cutoff(u: np.ndarray) -> np.ndarray:
    """C^1 plateau cutoff: 1 on |u| <= 0.2, cos^2 ramp to 0 at |u| = 0.4."""
    a = np.abs(u)
    ramp = np.cos(np.pi * (a - 0.2) / 0.4) ** 2
    return np.where(a <= 0.2, 1.0, np.where(a < 0.4, ramp, 0.0))


def chirp_train(alpha: float) -> Function:
    """Sum over n >= 2 of cutoff(x-n) n^(-2 alpha) sin(n^2 (x-n)).

    Globally alpha-Hölder but not little-Hölder: the bump at n needs the scale
    t ~ n^-2 to flatten, so the small-t quotient never decays uniformly in x.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise DomainError("chirp_train needs alpha in (0, 1]")

    def ev(x):
        n = np.rint(x)
        u = x - n
        out = np.zeros_like(x)
        m = (n >= 2) & (np.abs(u) < 0.4)
        nm, um = n[m], u[m]
        out[m] = cutoff(um) * nm ** (-2.0 * alpha) * np.sin(nm * nm * um)
        return out

    return Function(ev, 2.0 ** (-2.0 * alpha), f"chirp_train:{alpha!r}")


def neg_quadratic() -> Function:
    """x -> -(1 + x^2); a multiplier, not an element of C_b."""
    return Function(lambda x: -(1.0 + x * x), None, "neg_quadratic")


# name -> (factory, takes parameter, default parameter, description)
LIBRARY: dict[str, tuple[Callable, bool, float | None, str]] = {
    "zero": (zero, False, None, "the zero function"),
    "const": (constant, True, 1.0, "constant c"),
    "sin": (sine, False, None, "sin x"),
    "cos": (cosine, False, None, "cos x"),
    "rational": (rational, True, 1.0, "(1+x^2)^(-beta)"),
    "holder_bump": (holder_bump, True, 0.5, "|sin x|^beta"),
    "chirp_train": (chirp_train, True, 0.5, "sum_n phi(x-n) n^(-2a) sin(n^2 (x-n))"),
    "neg_quadratic": (neg_quadratic, False, None, "-(1+x^2), multiplier only"),
}


def parse_function(label: str) -> Function:
    """Build a library function from ``name`` or ``name:param``."""
    name, sep, param = str(label).strip().partition(":")
    if name not in LIBRARY:
        raise ConfigError(f"unknown function {label!r}; known: {', '.join(LIBRARY)}")
    factory, takes_param, default, _ = LIBRARY[name]
    if not takes_param:
        if sep:
            raise ConfigError(f"function {name!r} takes no parameter")
        return factory()
    if sep:
        try:
            value = float(param)
        except ValueError as exc:
            raise ConfigError(f"bad parameter in function label {label!r}") from exc
    else:
        value = default
    try:
        f = factory(value)
    except DomainError as exc:
        raise ConfigError(f"function {label!r}: {exc}") from exc
    return f
