"""Favard and Hölder scale estimators, membership tests and the translation chain.

Every verdict is a slope decision on a finite probe schedule. A probe point
counts only when it is *window-certified*: the supremum over the central 75%
of the spatial grid is within 1% of the supremum over the whole grid. Points
whose maximiser sits near the window edge say more about the window than
about the function and are left out of every fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChainConsistencyError, DomainError
from .funcspace import (
    DEFAULT_KS, CompactSet, Function, Grid, default_grid, sample, wide_grid,
)
from .quadrature import QuadratureSpec
from .resolvent import ResolventRequest, resolve
from .semigroups import SemigroupDescriptor, apply, generator_apply, translation

CERTIFY_RTOL = 1e-2
FINITE_SLOPE = -0.05
DIVERGING_SLOPE = -0.1
MEMBER_SLOPE = 0.05
FLAT_SLOPE = 0.02
RES_QUAD = QuadratureSpec(panels=64)
# differences below this multiple of ||f|| are rounding noise and count as zero
NOISE_FLOOR = 1e-13
CHAIN = ("C1", "Lip", "h_b", "h_b_loc", "C_alpha", "BUC", "C_b")


@dataclass(frozen=True)
class ProbeSchedule:
    """Geometric t- and lambda-grids."""

    t_min: float = 1e-6
    t_max: float = 1e2
    t_n: int = 81
    lam_min: float = 1e-2
    lam_max: float = 1e6
    lam_n: int = 81

    def __post_init__(self):
        for lo, hi, n, name in ((self.t_min, self.t_max, self.t_n, "t"),
                                (self.lam_min, self.lam_max, self.lam_n, "lambda")):
            if not (0 < lo < hi and math.isfinite(hi)):
                raise DomainError(f"{name} grid needs 0 < min < max, got [{lo}, {hi}]")
            if int(n) != n or n < 2:
                raise DomainError(f"{name} grid needs an integer size >= 2, got {n}")

    @property
    def t_grid(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, int(self.t_n))

    @property
    def lambda_grid(self) -> np.ndarray:
        return np.geomspace(self.lam_min, self.lam_max, int(self.lam_n))

    def as_dict(self) -> dict:
        return {"t_grid": [self.t_min, self.t_max, self.t_n],
                "lambda_grid": [self.lam_min, self.lam_max, self.lam_n]}


@dataclass(frozen=True, eq=False)
class Profile:
    """Sup-norm of a difference family over a parameter grid.

    ``full`` is the grid maximum, ``inner`` the maximum over the central part
    of the window and ``local`` the maxima over each compact set.
    """

    params: np.ndarray
    full: np.ndarray
    inner: np.ndarray
    local: dict = field(default_factory=dict)
    fnorm: float = 0.0
    grid: Grid | None = None

    @property
    def certified(self) -> np.ndarray:
        return (self.full == 0.0) | (self.inner >= (1.0 - CERTIFY_RTOL) * self.full)


@dataclass(frozen=True, eq=False)
class FavardEstimate:
    alpha: float
    value: float
    sup_location: float
    slope: float
    verdict: str
    params: np.ndarray = field(repr=False, default=None)
    quotients: np.ndarray = field(repr=False, default=None)
    certified: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class MembershipResult:
    verdict: str
    slope: float
    quotient: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class HolderExponent:
    value: float
    slope: float
    fixed_point: bool = False

    def __float__(self) -> float:
        return self.value


def _check_alpha(alpha: float, closed: bool = True) -> float:
    alpha = float(alpha)
    ok = 0.0 < alpha <= 1.0 if closed else 0.0 < alpha < 1.0
    if not ok:
        raise DomainError(f"alpha must lie in (0, 1{']' if closed else ')'}, got {alpha}")
    return alpha


def _denoised(params, full, inner, local, fnorm, grid) -> Profile:
    floor = NOISE_FLOOR * fnorm
    for arr in (full, inner, *local.values()):
        arr[arr <= floor] = 0.0
    return Profile(params, full, inner, local, fnorm, grid)


def modulus_profile(sg: SemigroupDescriptor, f: Function, ts, grid: Grid | None = None,
                    Ks=(), shifted: bool = False) -> Profile:
    """sup_x |T(t)f(x) - f(x)| for every t in ``ts``."""
    grid = default_grid() if grid is None else grid
    x = grid.points
    base = sample(f, grid)
    inner = grid.inner_mask()
    masks = {K: K.mask(x) for K in Ks}
    ts = np.asarray(ts, dtype=float)
    full = np.empty(ts.size)
    inn = np.empty(ts.size)
    local = {K: np.empty(ts.size) for K in Ks}
    for i, t in enumerate(ts):
        d = np.abs(sample(apply(sg, t, f, shifted=shifted), grid) - base)
        full[i] = d.max()
        inn[i] = d[inner].max()
        for K, m in masks.items():
            local[K][i] = d[m].max() if m.any() else 0.0
    return _denoised(ts, full, inn, local, float(np.abs(base).max()), grid)


def resolvent_profile(sg: SemigroupDescriptor, f: Function, lams, grid: Grid | None = None,
                      quad: QuadratureSpec = RES_QUAD) -> Profile:
    """sup_x |lam R(lam)f(x) - f(x)| for every lam in ``lams``."""
    grid = default_grid() if grid is None else grid
    base = sample(f, grid)
    inner = grid.inner_mask()
    lams = np.asarray(lams, dtype=float)
    full = np.empty(lams.size)
    inn = np.empty(lams.size)
    for i, lam in enumerate(lams):
        r = sample(resolve(sg, ResolventRequest(float(lam), quad), f), grid)
        d = np.abs(lam * r - base)
        full[i] = d.max()
        inn[i] = d[inner].max()
    return _denoised(lams, full, inn, {}, float(np.abs(base).max()), grid)


def _fit(logx: np.ndarray, logy: np.ndarray) -> float:
    if logx.size < 2:
        return float("nan")
    return float(np.polyfit(logx, logy, 1)[0])


def _window(params, ok, decades: float, from_top: bool = False) -> np.ndarray:
    """Mask of the ``ok`` params within ``decades`` of the smallest (or largest) one."""
    if not ok.any():
        return ok
    if from_top:
        edge = params[ok].max()
        return ok & (params >= edge * 10.0 ** (-decades) * (1 - 1e-9))
    edge = params[ok].min()
    return ok & (params <= edge * 10.0 ** decades * (1 + 1e-9))


def _favard_verdict(slope: float) -> str:
    if slope >= FINITE_SLOPE:
        return "finite"
    if slope <= DIVERGING_SLOPE:
        return "diverging"
    return "inconclusive"


def _estimate(alpha, params, values, certified, quot, from_top) -> FavardEstimate:
    i = int(np.argmax(quot))
    value = float(quot[i])
    ok = certified & (values > 0)
    if not ok.any():
        verdict = "finite" if not np.any(values > 0) else "inconclusive"
        return FavardEstimate(alpha, value, float(params[i]), 0.0, verdict, params, quot, certified)
    w = _window(params, ok, 2.0, from_top)
    x = np.log(params[w])
    if from_top:
        x = -x
    slope = _fit(x, np.log(quot[w]))
    verdict = "inconclusive" if math.isnan(slope) else _favard_verdict(slope)
    return FavardEstimate(alpha, value, float(params[i]), slope, verdict, params, quot, certified)


def favard_sg(sg: SemigroupDescriptor, f: Function, alpha: float,
              sched: ProbeSchedule | None = None, grid: Grid | None = None,
              profile: Profile | None = None, shifted: bool = False) -> FavardEstimate:
    """sup_t ||T(t)f - f|| / t^alpha with a small-t slope verdict."""
    alpha = _check_alpha(alpha)
    sched = ProbeSchedule() if sched is None else sched
    if profile is None:
        profile = modulus_profile(sg, f, sched.t_grid, grid, shifted=shifted)
    t = profile.params
    quot = profile.full / t ** alpha
    return _estimate(alpha, t, profile.full, profile.certified, quot, from_top=False)


def favard_res(sg: SemigroupDescriptor, f: Function, alpha: float,
               sched: ProbeSchedule | None = None, grid: Grid | None = None,
               profile: Profile | None = None) -> FavardEstimate:
    """sup_lam ||lam^alpha (lam R(lam)f - f)|| with a large-lambda slope verdict."""
    alpha = _check_alpha(alpha)
    sched = ProbeSchedule() if sched is None else sched
    if profile is None:
        lams = sched.lambda_grid
        if not lams[0] > sg.omega:
            raise DomainError("lambda grid must lie above the growth bound")
        profile = resolvent_profile(sg, f, lams, grid)
    lam = profile.params
    quot = lam ** alpha * profile.full
    return _estimate(alpha, lam, profile.full, profile.certified, quot, from_top=True)


def _tol_member(fnorm: float) -> float:
    return 1e-2 * (1.0 + fnorm)


def little_holder(sg: SemigroupDescriptor, f: Function, alpha: float,
                  sched: ProbeSchedule | None = None, grid: Grid | None = None,
                  profile: Profile | None = None) -> MembershipResult:
    """Does ||T(t)f - f|| / t^alpha tend to 0 as t -> 0?"""
    alpha = _check_alpha(alpha, closed=False)
    sched = ProbeSchedule() if sched is None else sched
    if profile is None:
        profile = modulus_profile(sg, f, sched.t_grid, grid)
    t = profile.params
    tol = _tol_member(profile.fnorm)
    if not np.any(profile.full > 0):
        return MembershipResult("member", 0.0, 0.0, {"tol_member": tol})
    ok = profile.certified & (profile.full > 0)
    w = _window(t, ok, 3.0)
    quot = profile.full[w] / t[w] ** alpha
    slope = _fit(np.log(t[w]), np.log(quot))
    diag = {"tol_member": tol, "t_window": [float(t[w].min()), float(t[w].max())]} if w.any() else {}
    if math.isnan(slope):
        return MembershipResult("inconclusive", slope, float("nan"), diag)
    q0 = float(quot[0])
    if q0 < tol and slope >= MEMBER_SLOPE:
        verdict = "member"
    elif quot.min() > 10 * tol and abs(slope) <= FLAT_SLOPE:
        verdict = "non_member"
    else:
        verdict = "inconclusive"
    return MembershipResult(verdict, slope, q0, diag)


def _local_verdict(t, values, alpha, tol) -> tuple[str, float, float]:
    w = _window(t, np.ones_like(t, dtype=bool), 3.0) & (values > 0)
    if not np.any(values > 0):
        return "member", 0.0, 0.0
    quot = values[w] / t[w] ** alpha
    s = _fit(np.log(t[w]), np.log(quot))
    if math.isnan(s):
        return "inconclusive", s, float("nan")
    if s >= MEMBER_SLOPE:
        return "member", s, float(quot[0])
    if abs(s) <= FLAT_SLOPE and quot.min() > 10 * tol:
        return "non_member", s, float(quot[0])
    return "inconclusive", s, float(quot[0])


def bicont_holder(sg: SemigroupDescriptor, f: Function, alpha: float, Ks=DEFAULT_KS,
                  sched: ProbeSchedule | None = None, grid: Grid | None = None,
                  profile: Profile | None = None) -> MembershipResult:
    """Locally uniform little-Hölder test over a compact exhaustion, plus a finite Favard norm."""
    alpha = _check_alpha(alpha, closed=False)
    sched = ProbeSchedule() if sched is None else sched
    Ks = tuple(Ks)
    if profile is None or any(K not in profile.local for K in Ks):
        profile = modulus_profile(sg, f, sched.t_grid, grid, Ks)
    fav = favard_sg(sg, f, alpha, sched, profile=profile)
    tol = _tol_member(profile.fnorm)
    per_k = {}
    for K in Ks:
        v, s, q = _local_verdict(profile.params, profile.local[K], alpha, tol)
        per_k[f"[{K.a:g},{K.b:g}]"] = {"verdict": v, "slope": s, "quotient": q}
    verdicts = [d["verdict"] for d in per_k.values()]
    if fav.verdict == "diverging" or "non_member" in verdicts:
        verdict = "non_member"
    elif fav.verdict == "finite" and all(v == "member" for v in verdicts):
        verdict = "member"
    else:
        verdict = "inconclusive"
    slopes = [d["slope"] for d in per_k.values()]
    diag = {"favard": fav.verdict, "per_K": per_k}
    return MembershipResult(verdict, float(min(slopes)) if slopes else 0.0,
                            float(fav.value), diag)


def holder_exponent(sg: SemigroupDescriptor, f: Function, sched: ProbeSchedule | None = None,
                    grid: Grid | None = None, t_range=(1e-4, 1e-1)) -> HolderExponent:
    """Slope of log ||T(t)f - f|| against log t over ``t_range``, clamped to [0, 1]."""
    sched = ProbeSchedule() if sched is None else sched
    t = sched.t_grid
    t = t[(t >= t_range[0] * (1 - 1e-9)) & (t <= t_range[1] * (1 + 1e-9))]
    if t.size < 2:
        raise DomainError("probe schedule has fewer than two points in the exponent range")
    prof = modulus_profile(sg, f, t, grid)
    pos = prof.full > 0
    if not pos.any():
        return HolderExponent(1.0, float("nan"), fixed_point=True)
    slope = _fit(np.log(t[pos]), np.log(prof.full[pos]))
    if math.isnan(slope):
        return HolderExponent(1.0, slope, fixed_point=True)
    return HolderExponent(float(min(max(slope, 0.0), 1.0)), slope)


def interpolation_norm(sg: SemigroupDescriptor, f: Function, alpha: float, p: float,
                       sched: ProbeSchedule | None = None, grid: Grid | None = None,
                       profile: Profile | None = None) -> float:
    """L^p(dt/t) norm of psi(t) = t^-alpha ||T(t)f - f|| on the log-uniform t-grid."""
    alpha = _check_alpha(alpha, closed=False)
    p = float(p)
    if not p >= 1:
        raise DomainError(f"p must lie in [1, inf], got {p}")
    sched = ProbeSchedule() if sched is None else sched
    if profile is None:
        profile = modulus_profile(sg, f, sched.t_grid, grid)
    t = profile.params
    psi = profile.full / t ** alpha
    if math.isinf(p):
        return float(psi.max())
    dlog = math.log(t[-1] / t[0]) / (t.size - 1)
    return float(np.sum(psi ** p) * dlog) ** (1.0 / p)


# ---------------------------------------------------------------------------
# the translation chain C^1 < Lip < h_b < h_b,loc < C^alpha < BUC < C_b

def _c1_verdict(f: Function, grid: Grid, h: float = 1e-3) -> tuple[str, dict]:
    sg = translation()
    vals = [sample(generator_apply(sg, f, h / 2 ** k), grid) for k in range(3)]
    d1 = float(np.max(np.abs(vals[0] - vals[1])))
    d2 = float(np.max(np.abs(vals[1] - vals[2])))
    a = np.abs(vals[2])
    top = float(a.max())
    settled = d2 <= 1e-6 * (1.0 + top) or d2 <= 0.5 * d1
    bounded = top == 0.0 or a[grid.inner_mask()].max() >= (1.0 - CERTIFY_RTOL) * top
    diag = {"d1": d1, "d2": d2, "sup_Af": top, "bounded": bool(bounded)}
    return ("yes" if settled and bounded else "no"), diag


def _buc_verdict(profile: Profile) -> tuple[str, float]:
    if not np.any(profile.full > 0):
        return "yes", 0.0
    ok = profile.certified & (profile.full > 0)
    w = _window(profile.params, ok, 3.0)
    s = _fit(np.log(profile.params[w]), np.log(profile.full[w]))
    return ("yes" if s >= MEMBER_SLOPE else "no"), s


def chain_violations(verdicts) -> list[tuple[str, str]]:
    """Pairs (smaller, larger) where the smaller space says yes and the larger says no."""
    out = []
    for i, vi in enumerate(verdicts):
        for j in range(i + 1, len(verdicts)):
            if vi == "yes" and verdicts[j] == "no":
                out.append((CHAIN[i], CHAIN[j]))
    return out


@dataclass(frozen=True)
class ChainResult:
    alpha: float
    verdicts: tuple
    diagnostics: dict

    def as_dict(self) -> dict:
        return dict(zip(CHAIN, self.verdicts))


def classify_chain(f: Function, alpha: float, sched: ProbeSchedule | None = None,
                   grid: Grid | None = None, Ks=DEFAULT_KS) -> ChainResult:
    """Place f in the chain C^1, Lip, h^a_b, h^a_b,loc, C^a, BUC, C_b for translation.

    Raises ChainConsistencyError if a smaller space accepts f while a larger one rejects it.
    """
    alpha = _check_alpha(alpha, closed=False)
    sched = ProbeSchedule() if sched is None else sched
    grid = wide_grid() if grid is None else grid
    sg = translation()
    sample(f, grid)  # C_b: every value finite, else EvaluationError
    prof = modulus_profile(sg, f, sched.t_grid, grid, Ks)
    c1, c1_diag = _c1_verdict(f, grid)
    lip = favard_sg(sg, f, 1.0, sched, profile=prof)
    hb = little_holder(sg, f, alpha, sched, profile=prof)
    hloc = bicont_holder(sg, f, alpha, Ks, sched, profile=prof)
    calpha = favard_sg(sg, f, alpha, sched, profile=prof)
    buc, buc_slope = _buc_verdict(prof)

    def yn(v, good):
        return "yes" if v == good else ("no" if v in ("diverging", "non_member") else "inconclusive")

    verdicts = (c1, yn(lip.verdict, "finite"), yn(hb.verdict, "member"),
                yn(hloc.verdict, "member"), yn(calpha.verdict, "finite"), buc, "yes")
    diag = {"C1": c1_diag, "Lip_slope": lip.slope, "h_b_slope": hb.slope,
            "h_b_loc": hloc.diagnostics, "C_alpha_slope": calpha.slope, "BUC_slope": buc_slope,
            "grid": grid.as_list()}
    bad = chain_violations(verdicts)
    if bad:
        diag["violations"] = bad
        raise ChainConsistencyError(
            f"non-monotone chain for {f.label} at alpha={alpha}: {dict(zip(CHAIN, verdicts))}",
            diag)
    return ChainResult(alpha, verdicts, diag)


def record(function: str, semigroup: str, alpha, test: str, value, slope, verdict,
           grids: dict) -> dict:
    """Report record for one (function, semigroup, alpha, test) cell."""
    def num(v):
        if v is None:
            return None
        v = float(v)
        return v if math.isfinite(v) else None

    return {"function": function, "semigroup": semigroup,
            "alpha": None if alpha is None else float(alpha), "test": test,
            "value": num(value), "slope": num(slope), "verdict": verdict, "grids": grids}
