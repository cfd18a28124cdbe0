"""Translation, multiplication and Gauss-Weierstrass semigroups on C_b(R)."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DomainError
from .funcspace import Function, Grid, default_grid, parse_function, sample
from .quadrature import simpson_rule

KINDS = ("translation", "multiplication", "heat")

HEAT_RADIUS = 8.0  # truncation radius in units of sqrt(2t)
HEAT_PANELS = 100  # 201 Simpson nodes
_CHUNK = 1 << 20
_LOOP_MIN = 4096


@dataclass(frozen=True)
class SemigroupDescriptor:
    """One of the three concrete semigroups, with type (M, omega) and shift sigma.

    ``apply`` acts with the raw family T(t); with ``shifted=True`` it acts with
    e^{-sigma t} T(t), whose growth bound ``omega_eff = omega - sigma`` is what
    extrapolation needs to be negative.
    """

    kind: str
    q: Function | None = None
    M: float = 1.0
    omega: float = 0.0
    sigma: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown semigroup kind {self.kind!r}")
        if (self.kind == "multiplication") != (self.q is not None):
            raise DomainError("a multiplier q is required exactly for the multiplication kind")
        if self.M < 1:
            raise DomainError("type constant M must be >= 1")
        if self.sigma < 0:
            raise DomainError("shift sigma must be >= 0")
        if not self.label:
            name = self.kind if self.q is None else f"multiplication:{self.q.label}"
            object.__setattr__(self, "label", name)

    @property
    def omega_eff(self) -> float:
        return self.omega - self.sigma

    def with_sigma(self, sigma: float) -> SemigroupDescriptor:
        return replace(self, sigma=float(sigma))

    def type_bound(self, t: float, shifted: bool = False) -> float:
        w = self.omega_eff if shifted else self.omega
        return self.M * math.exp(w * t)


def translation(sigma: float = 1.0) -> SemigroupDescriptor:
    return SemigroupDescriptor("translation", sigma=sigma)


def heat(sigma: float = 1.0) -> SemigroupDescriptor:
    return SemigroupDescriptor("heat", sigma=sigma)


def multiplication(q: Function, sigma: float = 0.0, grid: Grid | None = None,
                   label: str = "") -> SemigroupDescriptor:
    """Multiplication semigroup e^{tq}; sup q over the grid must be negative."""
    grid = default_grid() if grid is None else grid
    omega = float(np.max(sample(q, grid)))
    if not omega < 0:
        raise DomainError(f"multiplier {q.label} needs sup q < 0, found {omega}")
    return SemigroupDescriptor("multiplication", q=q, omega=omega, sigma=sigma, label=label)


def parse_semigroup(label: str, grid: Grid | None = None) -> SemigroupDescriptor:
    """``translation``, ``heat`` or ``multiplication:<q label>``."""
    name, _, rest = str(label).strip().partition(":")
    if name == "translation" and not rest:
        return translation()
    if name == "heat" and not rest:
        return heat()
    if name == "multiplication" and rest:
        try:
            return multiplication(parse_function(rest), grid=grid, label=label)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown semigroup {label!r}; use translation, heat or multiplication:<q>")


def heat_rule(t: float) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and unit-mass weights for convolution with the heat kernel at time t."""
    r = HEAT_RADIUS * math.sqrt(2.0 * t)
    y, w = simpson_rule(-r, r, HEAT_PANELS)
    w = w * np.exp(-y * y / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    return y, w / w.sum()


def convolve_eval(f: Function, offsets: np.ndarray, weights: np.ndarray):
    """Evaluation rule x -> sum_j weights_j f(x - offsets_j), chunked over x."""

    def ev(x):
        flat = np.ravel(x)
        if flat.size >= _LOOP_MIN:
            # long arrays: one pass per offset is faster than a 2-D block
            out = np.zeros(flat.shape)
            for y, w in zip(offsets, weights):
                out += w * f(flat - y)
            return out.reshape(np.shape(x))
        out = np.empty(flat.shape)
        step = max(1, _CHUNK // offsets.size)
        for i in range(0, flat.size, step):
            xs = flat[i:i + step]
            out[i:i + step] = f(xs[:, None] - offsets[None, :]) @ weights
        return out.reshape(np.shape(x))

    return ev


def apply(sg: SemigroupDescriptor, t: float, f: Function, shifted: bool = False) -> Function:
    """The function T(t)f (or e^{-sigma t} T(t) f when ``shifted``)."""
    t = float(t)
    if not t >= 0:
        raise DomainError(f"semigroup time must be >= 0, got {t}")
    if t == 0.0:
        return f
    if sg.kind == "translation":
        out = Function(lambda x: f(x + t), f.bound_hint, f"T({t!r}){f.label}")
    elif sg.kind == "multiplication":
        q = sg.q
        out = Function(lambda x: np.exp(t * q(x)) * f(x), f.bound_hint, f"T({t!r}){f.label}")
    else:
        y, w = heat_rule(t)
        out = Function(convolve_eval(f, y, w), f.bound_hint, f"T({t!r}){f.label}")
    if shifted and sg.sigma:
        return out.scale(math.exp(-sg.sigma * t))
    return out


def _uniform_with_step(x: np.ndarray, h: float) -> bool:
    if x.ndim != 1 or x.size < 3:
        return False
    ref = x[0] + h * np.arange(x.size)
    return bool(np.max(np.abs(x - ref)) <= 1e-9 * h)


def _stencil(F: Function, h: float, coeffs: tuple[float, float, float]):
    """x -> c0 F(x-h) + c1 F(x) + c2 F(x+h); shares evaluations on matching grids."""
    c0, c1, c2 = coeffs

    def ev(x):
        if _uniform_with_step(x, h):
            ext = x[0] + h * np.arange(-1, x.size + 1)
            v = F(ext)
            return c0 * v[:-2] + c1 * v[1:-1] + c2 * v[2:]
        return c0 * F(x - h) + c1 * F(x) + c2 * F(x + h)

    return ev


def generator_apply(sg: SemigroupDescriptor, f: Function, h: float = 1e-4,
                    shifted: bool = False) -> Function:
    """Af by the kind's rule: central difference, exact product, or second difference.

    Non-smooth f gives large stencil values; compare against h/2 to detect f
    outside the domain of the generator.
    """
    if not h > 0:
        raise DomainError("stencil step must be positive")
    if sg.kind == "translation":
        ev = _stencil(f, h, (-0.5 / h, 0.0, 0.5 / h))
    elif sg.kind == "heat":
        ev = _stencil(f, h, (1.0 / h ** 2, -2.0 / h ** 2, 1.0 / h ** 2))
    else:
        q = sg.q

        def ev(x):
            return q(x) * f(x)

    if shifted and sg.sigma:
        base, s = ev, sg.sigma

        def ev(x):
            return base(x) - s * f(x)

    return Function(ev, None, f"A{f.label}")


def orbit_integral(sg: SemigroupDescriptor, t: float, f: Function, panels: int = 16,
                   shifted: bool = False) -> Function:
    """x -> int_0^t (T(s)f)(x) ds by composite Simpson."""
    t = float(t)
    if not t > 0:
        raise DomainError("orbit integral needs t > 0")
    s, w = simpson_rule(0.0, t, panels)
    parts = [apply(sg, si, f, shifted=shifted) for si in s]

    def ev(x):
        acc = np.zeros(np.shape(x))
        for wi, g in zip(w, parts):
            acc += wi * g(x)
        return acc

    bound = None if f.bound_hint is None else t * f.bound_hint
    return Function(ev, bound, f"int_0^{t!r} T(s){f.label} ds")
