import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given, settings, strategies as st

from semiscale.errors import ChainConsistencyError, DomainError
from semiscale.funcspace import (
    CompactSet, Function, Grid, chirp_train, constant, holder_bump, neg_quadratic, rational, sine,
    zero,
)
from semiscale.scales import (
    CHAIN, ProbeSchedule, bicont_holder, chain_violations, classify_chain, favard_res, favard_sg,
    holder_exponent, interpolation_norm, little_holder, modulus_profile, record,
)
from semiscale import scales
from semiscale.semigroups import heat, multiplication, translation

TR = translation()
# a cheaper spatial grid for property sweeps; same spacing near the kinks that matter
G = Grid(-20.0, 20.0, 8001)


def test_probe_schedule_defaults():
    s = ProbeSchedule()
    t, lam = s.t_grid, s.lambda_grid
    assert t.size == 81 and lam.size == 81
    assert t[0] == pytest.approx(1e-6) and t[-1] == pytest.approx(1e2)
    assert lam[0] == pytest.approx(1e-2) and lam[-1] == pytest.approx(1e6)
    assert np.all(np.diff(t) > 0) and np.all(np.diff(lam) > 0)
    with pytest.raises(DomainError):
        ProbeSchedule(t_min=0.0)
    with pytest.raises(DomainError):
        ProbeSchedule(lam_n=1)


def test_favard_sg_sin_oracle():
    e = favard_sg(TR, sine(), 1.0)
    # sup over t of 2|sin(t/2)|/t, attained at the smallest t
    t0 = 1e-6
    assert e.value == pytest.approx(2 * math.sin(t0 / 2) / t0, abs=1e-9)
    assert e.verdict == "finite" and e.sup_location == pytest.approx(t0)
    quot = 2 * np.abs(np.sin(e.params / 2)) / e.params
    # grid sampling of the sup costs at most O(h^2) relative
    assert np.all(np.abs(e.quotients - quot) <= 1e-5 * quot)


@pytest.mark.parametrize("sg", [TR, heat(), multiplication(constant(-1.0))], ids=lambda s: s.kind)
def test_favard_of_zero(sg):
    e = favard_sg(sg, zero(), 0.5, ProbeSchedule(t_n=21))
    assert e.value == 0.0 and e.verdict == "finite"
    r = favard_res(sg, zero(), 0.5, ProbeSchedule(lam_n=21))
    assert r.value == 0.0 and r.verdict == "finite"


def test_favard_sg_kink_diverges():
    e = favard_sg(TR, holder_bump(0.5), 0.75)
    assert e.verdict == "diverging"
    assert e.slope == pytest.approx(-0.25, abs=0.02)


def test_favard_res_multiplication_constant():
    sg = multiplication(constant(-1.0))
    e = favard_res(sg, constant(1.0), 1.0)
    lam = e.params
    assert np.allclose(e.quotients, lam / (lam + 1), rtol=1e-12)
    assert e.value == pytest.approx(1.0, abs=1e-5)
    assert e.verdict == "finite"


def test_favard_res_translation_sin():
    sg_value = favard_sg(TR, sine(), 1.0).value
    e = favard_res(TR, sine(), 1.0)
    assert e.verdict == "finite"
    assert 0.5 <= e.value / sg_value <= 2.0


def test_favard_res_rejects_low_lambda():
    with pytest.raises(DomainError):
        favard_res(TR, sine(), 0.5, ProbeSchedule(lam_min=0.0))


def test_little_holder_examples():
    assert little_holder(TR, sine(), 0.5).verdict == "member"
    r = little_holder(TR, holder_bump(0.5), 0.5)
    assert r.verdict == "non_member"
    assert r.quotient == pytest.approx(1.0, abs=1e-3)
    assert little_holder(TR, zero(), 0.5).verdict == "member"
    with pytest.raises(DomainError):
        little_holder(TR, sine(), 1.0)


def test_bicont_examples():
    chirp = chirp_train(0.5)
    ks = [CompactSet(-5.0, 5.0), CompactSet(-20.0, 20.0)]
    r = bicont_holder(TR, chirp, 0.5, ks)
    assert r.verdict == "member"
    assert set(r.diagnostics["per_K"]) == {"[-5,5]", "[-20,20]"}
    assert bicont_holder(TR, zero(), 0.5).verdict == "member"
    assert bicont_holder(TR, holder_bump(0.5), 0.5).verdict == "non_member"


def test_chirp_oracle_scales():
    # at t_n = n^-2 the bump at n alone keeps the quotient of order one
    f = chirp_train(0.5)
    for n in (30, 60, 120):
        t = n ** -2.0
        x = n + np.linspace(-0.2, 0.2, 20001)
        q = np.max(np.abs(f(x + t) - f(x))) / t ** 0.5
        assert q > 0.5
    wide = Grid(-160.0, 160.0, 64001)
    assert little_holder(TR, f, 0.5, grid=wide).verdict == "non_member"


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
def test_holder_exponent_translation(beta):
    h = holder_exponent(TR, holder_bump(beta))
    assert h.value == pytest.approx(beta, abs=0.05)
    assert not h.fixed_point


def test_holder_exponent_sin_and_fixed_point():
    assert holder_exponent(TR, sine()).value == pytest.approx(1.0, abs=0.01)
    h = holder_exponent(TR, constant(2.0))
    assert h.fixed_point and h.value == 1.0
    assert float(h) == 1.0


def test_holder_exponent_clamped():
    # a discontinuous step has a flat modulus -> exponent clamps at 0
    step = Function(lambda x: np.where(x > 0.0001, 1.0, 0.0), 1.0, "step")
    assert holder_exponent(TR, step).value == pytest.approx(0.0, abs=0.05)


def test_interpolation_norm_examples():
    assert interpolation_norm(TR, zero(), 0.5, 2) == 0.0
    assert interpolation_norm(TR, zero(), 0.5, math.inf) == 0.0
    prof = modulus_profile(TR, sine(), ProbeSchedule().t_grid)
    assert interpolation_norm(TR, sine(), 0.5, math.inf, profile=prof) == \
        favard_sg(TR, sine(), 0.5, profile=prof).value
    a = interpolation_norm(TR, sine(), 0.5, 2)
    b = interpolation_norm(TR, sine(), 0.5, 2, ProbeSchedule(t_n=161))
    assert abs(a - b) / b < 0.01
    # oracle: fine Riemann sum of (2 sin(t/2))^2 / t over dt/t
    t = np.geomspace(1e-6, 1e2, 20001)
    psi2 = (2 * np.sin(t / 2)) ** 2 / t
    ref = math.sqrt(trapezoid(psi2, np.log(t)))
    assert b == pytest.approx(ref, rel=0.01)
    with pytest.raises(DomainError):
        interpolation_norm(TR, sine(), 0.5, 0.5)


@pytest.mark.parametrize("label, f, expected", [
    ("sin", sine(), ("yes",) * 7),
    ("bump", holder_bump(0.5), ("no", "no", "no", "no", "yes", "yes", "yes")),
    ("chirp", chirp_train(0.5), ("no", "no", "no", "yes", "yes", "yes", "yes")),
    ("zero", zero(), ("yes",) * 7),
])
def test_classify_chain(label, f, expected):
    r = classify_chain(f, 0.5)
    assert r.verdicts == expected
    assert not chain_violations(r.verdicts)
    assert list(r.as_dict()) == list(CHAIN)


def test_chain_violations_and_error(monkeypatch):
    assert chain_violations(("yes", "no", "yes")) == [("C1", "Lip")]
    assert chain_violations(("no", "inconclusive", "yes")) == []
    monkeypatch.setattr(scales, "_buc_verdict", lambda prof: ("no", -1.0))
    with pytest.raises(ChainConsistencyError) as info:
        classify_chain(sine(), 0.5)
    assert ("C_alpha", "BUC") in info.value.diagnostics["violations"]


def test_record_serialises_non_finite_as_null():
    r = record("sin", "translation", 0.5, "favard_sg", math.inf, math.nan, "finite", {})
    assert r["value"] is None and r["slope"] is None and r["alpha"] == 0.5
    assert set(r) == {"function", "semigroup", "alpha", "test", "value", "slope", "verdict", "grids"}


def test_multiplication_verdicts():
    sg = multiplication(neg_quadratic())
    for a in (0.3, 0.7):
        assert favard_sg(sg, rational(a), a).verdict == "finite"
        assert favard_sg(sg, rational(a / 2), a).verdict == "diverging"


def test_multiplication_divergence_grows_with_window():
    # widening the window uncovers ever larger quotients for the diverging member
    sg = multiplication(neg_quadratic())
    f = rational(0.15)
    vals = [favard_sg(sg, f, 0.3, grid=Grid(-L, L, 40 * int(L) * 10 + 1)).value for L in (10.0, 40.0, 160.0)]
    assert vals[0] < vals[1] < vals[2]
    ok = [favard_sg(sg, rational(0.3), 0.3, grid=Grid(-L, L, 40 * int(L) * 10 + 1)).value
          for L in (10.0, 40.0, 160.0)]
    assert max(ok) / min(ok) < 1.05


FUNCS = st.one_of(
    st.builds(rational, st.floats(0.2, 2.0)),
    st.builds(holder_bump, st.floats(0.2, 1.0)),
    st.just(sine()),
)
SCHED = ProbeSchedule(t_n=41)


@settings(max_examples=15, deadline=None)
@given(FUNCS, st.floats(0.1, 1.0))
def test_verdict_matches_slope(f, alpha):
    e = favard_sg(TR, f, alpha, SCHED, G)
    if e.verdict == "finite":
        assert e.slope >= -0.05
    elif e.verdict == "diverging":
        assert e.slope <= -0.1


@settings(max_examples=15, deadline=None)
@given(FUNCS, st.floats(0.15, 1.0), st.floats(0.05, 0.95))
def test_monotone_in_alpha(f, alpha, frac):
    prof = modulus_profile(TR, f, SCHED.t_grid, G)
    beta = alpha * frac
    if favard_sg(TR, f, alpha, SCHED, profile=prof).verdict == "finite":
        assert favard_sg(TR, f, beta, SCHED, profile=prof).verdict == "finite"


@settings(max_examples=15, deadline=None)
@given(FUNCS, st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3), st.floats(0.1, 1.0))
def test_scaling(f, c, alpha):
    a = favard_sg(TR, f, alpha, SCHED, G).value
    b = favard_sg(TR, f.scale(c), alpha, SCHED, G).value
    assert b == pytest.approx(abs(c) * a, rel=1e-12)
