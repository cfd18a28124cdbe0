"""Laplace-transform resolvents, resolvent powers, Hille-Yosida probes and Euler iterates.

Single resolvents are evaluated pointwise by quadrature of the Laplace
integral (or a closed form where one exists). Powers and Euler iterates
memoise every intermediate level on a uniform grid; the next resolvent acts on
the piecewise-linear interpolant of that level through exact product
integration, so the only extra error is the O(h^2) interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import DomainError, SpectralParameterError
from .funcspace import (
    CompactSet, Function, Grid, default_grid, from_samples, sample, sup_norm,
)
from .quadrature import MIN_DECAY, QuadratureSpec, simpson_rule
from .semigroups import SemigroupDescriptor, apply, convolve_eval


_COARSE = Grid(-40.0, 40.0, 801)


@dataclass(frozen=True)
class ResolventRequest:
    lam: float
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise SpectralParameterError(f"lambda must be finite, got {self.lam}")


def norm_hint(f: Function) -> float:
    """Known sup bound of f, else a coarse grid maximum."""
    if f.bound_hint is not None:
        return float(f.bound_hint)
    return sup_norm(f, _COARSE)


def _check_lambda(sg: SemigroupDescriptor, lam: float) -> None:
    if not lam > sg.omega:
        raise SpectralParameterError(
            f"lambda={lam} must exceed the growth bound {sg.omega} of {sg.label}")


def _exp_mass(lam: float, s_max: float) -> float:
    """int_0^s_max e^{-lam s} ds, or the full 1/lam once the tail is negligible."""
    if lam * s_max >= MIN_DECAY:
        return 1.0 / lam
    if lam == 0.0:
        return s_max
    return -math.expm1(-lam * s_max) / lam


def laplace_rule(sg: SemigroupDescriptor, lam: float, norm: float,
                 quad: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Simpson nodes on [0, s_max] with weights for e^{-lam s} ds.

    The weights are rescaled to integrate e^{-lam s} exactly. When the
    cutoff reaches MIN_DECAY decay lengths the full mass 1/lam is used, so
    lam R(lam) c = c holds for constants; the neglected tail is below e^-30.
    """
    rate = lam - sg.omega
    s_max = quad.cutoff(norm, rate)
    s, w = simpson_rule(0.0, s_max, quad.panels)
    w = w * np.exp(-lam * s)
    return s, w * (_exp_mass(lam, s_max) / w.sum())


def _laplace_resolve(sg, lam, f, quad) -> Function:
    norm = norm_hint(f)
    s, w = laplace_rule(sg, lam, norm, quad)
    if sg.kind == "translation":
        ev = convolve_eval(f, -s, w)
    elif sg.kind == "multiplication":
        q = sg.q

        def ev(x):
            return f(x) * (np.exp(np.multiply.outer(q(x), s)) @ w)
    else:
        parts = [apply(sg, si, f) for si in s]

        def ev(x):
            acc = np.zeros(np.shape(x))
            for wi, g in zip(w, parts):
                acc += wi * g(x)
            return acc

    return Function(ev, norm / (lam - sg.omega), f"R({lam!r}){f.label}")


def heat_resolvent_rule(lam: float, norm: float, quad: QuadratureSpec):
    """Offsets/weights for convolution with e^{-sqrt(lam)|y|} / (2 sqrt(lam))."""
    kappa = math.sqrt(lam)
    decay = max(math.log(norm / (quad.tol * lam)) if norm > quad.tol * lam else 0.0, MIN_DECAY)
    y_max = decay / kappa
    y, w = simpson_rule(0.0, y_max, quad.panels)
    w = w * np.exp(-kappa * y) / (2.0 * kappa)
    w *= (0.5 / lam) / w.sum()
    return np.concatenate([y, -y]), np.concatenate([w, w])


def _heat_resolve(lam, f, quad) -> Function:
    norm = norm_hint(f)
    y, w = heat_resolvent_rule(lam, norm, quad)
    return Function(convolve_eval(f, y, w), norm / lam, f"R({lam!r}){f.label}")


def resolve(sg: SemigroupDescriptor, req: ResolventRequest, f: Function,
            method: str = "auto") -> Function:
    """R(lam, A)f = int_0^inf e^{-lam s} T(s)f ds.

    ``method``: ``laplace`` integrates the semigroup orbit by composite
    Simpson for any kind; ``closed`` (multiplication) divides by lam - q;
    ``kernel`` (heat) convolves with the Laplace transform of the heat kernel.
    ``auto`` picks ``closed``/``kernel``/``laplace`` by kind.
    """
    lam = float(req.lam)
    _check_lambda(sg, lam)
    if method == "auto":
        method = {"multiplication": "closed", "heat": "kernel"}.get(sg.kind, "laplace")
    if method == "laplace":
        return _laplace_resolve(sg, lam, f, req.quad)
    if method == "closed":
        if sg.kind != "multiplication":
            raise DomainError("closed-form resolvent exists only for multiplication")
        q = sg.q
        bound = None if f.bound_hint is None else f.bound_hint / (lam - sg.omega)
        return Function(lambda x: f(x) / (lam - q(x)), bound, f"R({lam!r}){f.label}")
    if method == "kernel":
        if sg.kind != "heat":
            raise DomainError("kernel resolvent exists only for the heat semigroup")
        return _heat_resolve(lam, f, req.quad)
    raise DomainError(f"unknown resolvent method {method!r}")


# ---------------------------------------------------------------------------
# memoised levels


def _hat_moments(mu: float) -> tuple[float, float]:
    """int_0^1 e^{-mu v}(1-v) dv and int_0^1 e^{-mu v} v dv."""
    if mu < 1e-3:
        a = sum((-mu) ** k / math.factorial(k + 2) for k in range(6))
        b = sum((-mu) ** k * (k + 1) / math.factorial(k + 2) for k in range(6))
        return a, b
    e = math.exp(-mu)
    return (mu - 1.0 + e) / mu ** 2, (1.0 - e * (1.0 + mu)) / mu ** 2


def _exp_hat_weights(rate: float, h: float, J: int) -> np.ndarray:
    """c_j = int_0^{Jh} e^{-rate s} hat_j(s) ds for the piecewise-linear hats at jh.

    Rescaled to total mass 1/rate so constants pass through a level unchanged.
    """
    mu = rate * h
    a, b = _hat_moments(mu)
    decay = np.exp(-mu * np.arange(J))
    c = np.zeros(J + 1)
    c[:-1] += h * decay * a
    c[1:] += h * decay * b
    return c * ((1.0 / rate) / c.sum())


def _level_cells(sg, lam, norm, quad, h) -> tuple[int, int]:
    """Grid cells a resolvent level reads to the left and right of each point."""
    if sg.kind == "multiplication":
        return 0, 0
    if sg.kind == "translation":
        return 0, int(math.ceil(quad.cutoff(norm, lam - sg.omega) / h - 1e-9))
    kappa = math.sqrt(lam)
    decay = max(math.log(norm / (quad.tol * lam)) if norm > quad.tol * lam else 0.0, MIN_DECAY)
    J = int(math.ceil(decay / kappa / h - 1e-9))
    return J, J


def _discrete_level(sg, lam, g: Grid, values: np.ndarray, cells) -> tuple[Grid, np.ndarray]:
    left, right = cells
    h = g.h
    if sg.kind == "multiplication":
        return g, values / (lam - sample(sg.q, g))
    if sg.kind == "translation":
        c = _exp_hat_weights(lam, h, right)
        out = signal.correlate(values, c, mode="valid")
    else:
        kappa = math.sqrt(lam)
        c = _exp_hat_weights(kappa, h, left) / (2.0 * kappa)
        kernel = np.concatenate([c[:0:-1], [2.0 * c[0]], c[1:]])
        out = signal.convolve(values, kernel, mode="valid")
    return Grid(g.a + left * h, g.b - right * h, g.n - left - right), out


def _iterate(sg, lam, k, f, quad, grid, scale) -> Function:
    """(scale * R(lam))^k f on ``grid`` through k memoised levels."""
    h = grid.h
    norm = norm_hint(f)
    cells = []
    for _ in range(k):
        cells.append(_level_cells(sg, lam, norm, quad, h))
        norm = norm * scale / (lam - sg.omega)
    g = grid.extended(h * sum(c[0] for c in cells), h * sum(c[1] for c in cells))
    values = sample(f, g)
    for c in cells:
        g, values = _discrete_level(sg, lam, g, values, c)
        values = scale * values
    return from_samples(g, values, f"({scale!r}R({lam!r}))^{k}{f.label}")


def resolve_power(sg: SemigroupDescriptor, lam: float, k: int, f: Function,
                  quad: QuadratureSpec | None = None, grid: Grid | None = None) -> Function:
    """R(lam, A)^k f by k-fold composition; k >= 2 is tabulated on ``grid``."""
    quad = QuadratureSpec() if quad is None else quad
    lam = float(lam)
    _check_lambda(sg, lam)
    if int(k) != k or k < 1:
        raise DomainError(f"resolvent power needs k >= 1, got {k}")
    if k == 1:
        return resolve(sg, ResolventRequest(lam, quad), f)
    if sg.kind == "multiplication":
        q = sg.q
        return Function(lambda x: f(x) / (lam - q(x)) ** k, None, f"R({lam!r})^{k}{f.label}")
    return _iterate(sg, lam, int(k), f, quad, default_grid() if grid is None else grid, 1.0)


def hy_probe(sg: SemigroupDescriptor, lam: float, k: int, probes: list[Function],
             quad: QuadratureSpec | None = None, grid: Grid | None = None) -> float:
    """Lower bound for ||R(lam, A)^k||: max of sup-norm ratios over nonzero probes."""
    grid = default_grid() if grid is None else grid
    if not probes:
        raise DomainError("hy_probe needs at least one probe function")
    best = 0.0
    used = 0
    for f in probes:
        n = sup_norm(f, grid)
        if n == 0.0:
            continue
        used += 1
        best = max(best, sup_norm(resolve_power(sg, lam, k, f, quad, grid), grid) / n)
    if not used:
        raise DomainError("every probe function vanishes on the grid")
    return best


def hy_bound(sg: SemigroupDescriptor, lam: float, k: int) -> float:
    """M / (lam - omega)^k."""
    return sg.M / (lam - sg.omega) ** k


def euler_approx(sg: SemigroupDescriptor, t: float, m: int, f: Function,
                 quad: QuadratureSpec | None = None, grid: Grid | None = None) -> Function:
    """((m/t) R(m/t, A))^m f, the implicit Euler approximation of T(t)f."""
    quad = QuadratureSpec() if quad is None else quad
    t = float(t)
    if not t > 0 or int(m) != m or m < 1:
        raise DomainError("euler_approx needs t > 0 and an integer m >= 1")
    lam = m / t
    _check_lambda(sg, lam)
    if sg.kind == "multiplication":
        q = sg.q
        return Function(lambda x: f(x) * (lam / (lam - q(x))) ** m, f.bound_hint,
                        f"euler({t!r},{m}){f.label}")
    return _iterate(sg, lam, int(m), f, quad, default_grid() if grid is None else grid, lam)


@dataclass(frozen=True)
class EulerError:
    m: int
    sup_error: float
    compact_error: float


def euler_errors(sg: SemigroupDescriptor, t: float, ms, f: Function,
                 quad: QuadratureSpec | None = None, grid: Grid | None = None,
                 K: CompactSet = CompactSet(-5.0, 5.0)) -> list[EulerError]:
    """Sup-norm and p_K distance of each Euler iterate from T(t)f on ``grid``."""
    grid = default_grid() if grid is None else grid
    exact = sample(apply(sg, t, f), grid)
    inK = K.mask(grid.points)
    out = []
    for m in ms:
        diff = np.abs(sample(euler_approx(sg, t, m, f, quad, grid), grid) - exact)
        pk = float(np.max(diff[inK])) if inK.any() else 0.0
        out.append(EulerError(int(m), float(np.max(diff)), pk))
    return out
