import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiscale.funcspace import parse_function

from conftest import SMALL, sup_diff
from semiscale.errors import ConfigError, DomainError
from semiscale.funcspace import (
    Function, Grid, constant, cosine, holder_bump, neg_quadratic, rational, sample, sine, sup_norm,
)
from semiscale.semigroups import (
    SemigroupDescriptor, apply, generator_apply, heat, heat_rule, multiplication, orbit_integral,
    parse_semigroup, translation,
)

NEG_ONE = constant(-1.0)


def kinds():
    return [translation(), multiplication(NEG_ONE), heat()]


def at(f, x):
    return float(f(np.array([x]))[0])


def test_translation_by_pi():
    g = apply(translation(), math.pi, sine())
    assert at(g, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert at(g, math.pi / 2) == pytest.approx(-1.0)


def test_multiplication_constant():
    g = apply(multiplication(NEG_ONE), 1.0, constant(1.0))
    assert at(g, 3.0) == pytest.approx(0.367879, abs=1e-6)


def test_heat_eigenfunction():
    g = apply(heat(), 0.5, sine())
    assert at(g, math.pi / 2) == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert at(g, math.pi / 2) == pytest.approx(0.606531, abs=1e-6)


def test_heat_rule_mass_and_width():
    y, w = heat_rule(0.3)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert y.size == 201
    assert np.max(np.abs(y)) == pytest.approx(8 * math.sqrt(0.6))
    # second moment of the kernel is 2t
    assert np.sum(w * y * y) == pytest.approx(0.6, rel=1e-10)


@pytest.mark.parametrize("sg", kinds(), ids=lambda s: s.kind)
def test_time_zero_is_identity(sg):
    f = sine()
    assert apply(sg, 0.0, f) is f
    with pytest.raises(DomainError):
        apply(sg, -0.1, f)


def test_shifted_family():
    sg = translation()
    g = apply(sg, 1.0, constant(1.0), shifted=True)
    assert at(g, 0.0) == pytest.approx(math.exp(-1.0))


def test_generator_translation(grid):
    d = generator_apply(translation(), sine(), h=1e-4)
    x = np.linspace(-10, 10, 4001)
    assert np.max(np.abs(d(x) - np.cos(x))) < 1e-8


def test_generator_multiplication_exact():
    q = neg_quadratic()
    d = generator_apply(multiplication(q), constant(1.0))
    x = np.linspace(-10, 10, 101)
    assert np.array_equal(d(x), -(1 + x * x))


def test_generator_heat():
    d = generator_apply(heat(), sine(), h=1e-3)
    x = np.linspace(-10, 10, 4001)
    assert np.max(np.abs(d(x) + np.sin(x))) < 1e-6


def test_stencil_shares_evaluations_on_matching_grid():
    calls = []

    def ev(x):
        calls.append(x.size)
        return np.sin(x)

    g = Grid(-1.0, 1.0, 201)
    d = generator_apply(translation(), Function(ev), h=g.h)
    v = d(g.points)
    assert calls == [203]
    assert np.max(np.abs(v - (np.sin(g.points + g.h) - np.sin(g.points - g.h)) / (2 * g.h))) < 1e-12


def test_generator_mesh_halving_detects_kink():
    f = holder_bump(0.5)
    vals = [abs(at(generator_apply(heat(), f, h=1e-2 / 2 ** k), 0.0)) for k in range(3)]
    assert vals[2] > 1.9 * vals[0]


def test_orbit_integral_examples():
    c = orbit_integral(translation(), 2.5, constant(3.0))
    assert at(c, 1.0) == pytest.approx(7.5)
    m = orbit_integral(multiplication(NEG_ONE), 1.0, constant(1.0))
    assert at(m, 0.0) == pytest.approx(1 - math.exp(-1), abs=1e-6)
    s = orbit_integral(translation(), math.pi, sine(), panels=32)
    x = np.linspace(-5, 5, 101)
    assert np.max(np.abs(s(x) - 2 * np.cos(x))) < 1e-6
    with pytest.raises(DomainError):
        orbit_integral(translation(), 0.0, sine())


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_semigroup_law_exact_kinds(grid, s, t):
    for sg, f in ((translation(), rational(1.0)), (multiplication(neg_quadratic()), sine())):
        lhs = apply(sg, t, apply(sg, s, f))
        rhs = apply(sg, t + s, f)
        assert sup_diff(lhs, rhs, grid) <= 1e-6 * (1 + sup_norm(f, grid))


@pytest.mark.parametrize("s, t", [(0.1, 0.1), (0.5, 1.0), (1.0, 0.1)])
def test_semigroup_law_heat(s, t):
    sg = heat()
    f = rational(1.0)
    assert sup_diff(apply(sg, t, apply(sg, s, f)), apply(sg, t + s, f), SMALL) <= 5e-3


@pytest.mark.parametrize("sg", [translation(), multiplication(NEG_ONE)], ids=lambda s: s.kind)
@pytest.mark.parametrize("t", [0.1, 1.0])
def test_midnight_with_generator_inside(grid, sg, t):
    f = sine()
    lhs = apply(sg, t, f) - f
    rhs = orbit_integral(sg, t, generator_apply(sg, f))
    assert sup_diff(lhs, rhs, grid) < 1e-3


def test_midnight_with_generator_inside_heat():
    sg, f = heat(), sine()
    for t in (0.1, 1.0):
        rhs = orbit_integral(sg, t, generator_apply(sg, f, h=1e-3))
        assert sup_diff(apply(sg, t, f) - f, rhs, SMALL) < 1e-3


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["sin", "cos", "rational", "holder_bump", "chirp_train", "const"]),
       st.sampled_from([0.1, 1.0, 10.0]),
       st.sampled_from(["translation", "heat", "multiplication:neg_quadratic",
                        "multiplication:const:-0.5"]))
def test_type_bound(label, t, sgl):
    g = Grid(-20.0, 20.0, 801)
    sg = parse_semigroup(sgl, g)
    f = parse_function(label)
    # shifted samples can sit closer to a peak than any grid point, so compare with the true sup
    assert sup_norm(apply(sg, t, f), g) <= sg.type_bound(t) * f.bound_hint + 1e-6


def test_descriptor_invariants():
    assert translation().M == 1 and translation().omega == 0 and translation().sigma == 1
    m = multiplication(neg_quadratic())
    assert m.omega == pytest.approx(-1.0) and m.sigma == 0
    assert m.omega_eff == pytest.approx(-1.0)
    assert heat().with_sigma(2.0).omega_eff == -2.0
    with pytest.raises(DomainError):
        multiplication(constant(0.0))
    with pytest.raises(DomainError):
        SemigroupDescriptor("translation", q=NEG_ONE)
    with pytest.raises(DomainError):
        SemigroupDescriptor("rotation")
    with pytest.raises(DomainError):
        SemigroupDescriptor("heat", M=0.5)


@pytest.mark.parametrize("label", ["translation", "heat", "multiplication:neg_quadratic"])
def test_parse_semigroup(label):
    assert parse_semigroup(label).label == label


@pytest.mark.parametrize("label", ["shift", "heat:2", "multiplication", "multiplication:sin",
                                   "multiplication:nope"])
def test_parse_semigroup_errors(label):
    with pytest.raises(ConfigError):
        parse_semigroup(label)
