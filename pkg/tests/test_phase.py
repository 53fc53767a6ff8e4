"""Observables, order-2 jets and the Poisson bracket."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superint.catalog import bind, parse_env
from superint.orbits import STRUCTURE_SIGN
from superint.parse import ExpressionSyntaxError, parse_expression
from superint.phase import (EUCLIDEAN, SPHERE, EvaluationError, const, PhasePoint, compile_observable,
                            eval_jet, evaluate, poisson, poisson_tree, sample_points, sin,
                            sphere_functions, var)

E = parse_env("Euclidean")
S = parse_env("Sphere")


def P(text, env=E):
    return parse_expression(text, env=env)


def _fd_grad(f, pt, params=None, h=1e-5):
    base = np.array(pt.as_tuple(), complex)
    out = np.zeros(4, complex)
    for k in range(4):
        # holomorphic: the real-direction difference is the complex derivative
        e = np.zeros(4, complex)
        e[k] = h
        up = evaluate(f, PhasePoint(pt.chart, *(base + e)), params)
        dn = evaluate(f, PhasePoint(pt.chart, *(base - e)), params)
        out[k] = (up - dn) / (2 * h)
    return out


def _rel(a, b):
    return abs(a - b) / (1 + max(abs(a), abs(b)))


# -- jets --------------------------------------------------------------------

def test_jet_of_quadratic():
    j = eval_jet(P("x^2+y^2"), PhasePoint(EUCLIDEAN, 1, 1, 0, 0))
    assert j.value == 2
    assert np.allclose(j.grad, [2, 2, 0, 0])


def test_e1_potential_reduces_to_radius_squared():
    b = bind("E1", {"omega": 1, "alpha": 0, "beta": 0})
    assert evaluate(b.potential, PhasePoint(EUCLIDEAN, 1, 1, 0, 0), b.numeric_params) == 2


def test_e13_gradient_matches_finite_differences():
    b = bind("E13")
    pt = sample_points(EUCLIDEAN, 4, 1, b.singular_set(), b.numeric_params)[0]
    j = eval_jet(b.potential, pt, b.numeric_params)
    fd = _fd_grad(b.potential, pt, b.numeric_params)
    assert np.abs(j.grad - fd).max() <= 1e-6 * (1 + np.abs(fd).max())


def test_singular_evaluation_names_node():
    with pytest.raises(EvaluationError, match="1/x"):
        eval_jet(P("1/x"), PhasePoint(EUCLIDEAN, 0, 1, 0, 0))


POLY = st.sampled_from(["x^2*py+y*px^3", "M^2+px*py", "x*y*px*py+3*x", "(x+i*y)^3*px",
                        "px^2+py^2+x^4"])
SEEDS = st.integers(0, 10_000)


@settings(max_examples=30, deadline=None)
@given(POLY, SEEDS)
def test_jet_matches_finite_differences(text, seed):
    f = P(text)
    pt = sample_points(EUCLIDEAN, seed, 1)[0]
    j = eval_jet(f, pt)
    fd = _fd_grad(f, pt)
    assert np.abs(j.grad - fd).max() <= 1e-5 * (1 + np.abs(fd).max())
    assert np.allclose(j.hess, j.hess.T)
    # second derivatives: difference the exact gradient
    for k in range(4):
        e = np.zeros(4, complex)
        e[k] = 1e-5
        base = np.array(pt.as_tuple())
        up = eval_jet(f, PhasePoint(EUCLIDEAN, *(base + e))).grad
        dn = eval_jet(f, PhasePoint(EUCLIDEAN, *(base - e))).grad
        assert np.abs(j.hess[k] - (up - dn) / 2e-5).max() <= 1e-5 * (1 + np.abs(j.hess).max())


def test_compiled_matches_tree():
    f = P("sqrt(x^2+y^2)*px+M/y")
    pt = sample_points(EUCLIDEAN, 2, 1, [var("y")])[0]
    assert _rel(compile_observable(f, EUCLIDEAN)(*pt.as_tuple()), evaluate(f, pt)) < 1e-14


# -- brackets ----------------------------------------------------------------

def test_bracket_sign_convention():
    assert poisson(E["px"], E["x"], PhasePoint(EUCLIDEAN, 0.3, 1.2, 2, 5)) == 1


def test_e3_bracket_a1_x():
    b = bind("E3", {"omega": 1})
    for pt in sample_points(EUCLIDEAN, 11, 20):
        lhs = poisson(b.observable("A1"), b.observable("X"), pt, b.numeric_params)
        rhs = 2 * evaluate(b.observable("A2"), pt, b.numeric_params)
        assert _rel(lhs, rhs) < 1e-10


def test_structure_constant_sign():
    # with M = x p_y - y p_x and {p, q} = 1 the rotation generators obey
    # {J1, J2} = -J3
    _, _, _, j1, j2, j3 = sphere_functions()
    assert STRUCTURE_SIGN == -1
    for pt in sample_points(SPHERE, 3, 30):
        assert _rel(poisson(j1, j2, pt), STRUCTURE_SIGN * evaluate(j3, pt)) < 1e-10
        assert _rel(poisson(j2, j3, pt), STRUCTURE_SIGN * evaluate(j1, pt)) < 1e-10
        assert _rel(poisson(j3, j1, pt), STRUCTURE_SIGN * evaluate(j2, pt)) < 1e-10


def test_sphere_embedding_and_casimir():
    x, y, z, j1, j2, j3 = sphere_functions()
    cas = j1 * j1 + j2 * j2 + j3 * j3
    kin = S["ptheta"] ** 2 + S["pphi"] ** 2 / (sin(S["theta"]) ** 2)
    for pt in sample_points(SPHERE, 8, 100):
        assert _rel(evaluate(x * x + y * y + z * z, pt), 1) < 1e-12
        assert _rel(evaluate(cas, pt), evaluate(kin, pt)) < 1e-10
        for j in (j1, j2, j3):
            assert abs(poisson(j, cas, pt)) < 1e-9 * (1 + abs(evaluate(cas, pt)))


@settings(max_examples=20, deadline=None)
@given(POLY, POLY, POLY, SEEDS)
def test_bracket_identities(a, b, c, seed):
    f, g, h = P(a), P(b), P(c)
    pt = sample_points(EUCLIDEAN, seed, 1)[0]
    fg = poisson(f, g, pt)
    assert _rel(fg, -poisson(g, f, pt)) < 1e-12
    leib = evaluate(f, pt) * poisson(g, h, pt) + evaluate(g, pt) * poisson(f, h, pt)
    assert _rel(poisson(f * g, h, pt), leib) < 1e-9
    ch = EUCLIDEAN
    jac = (poisson(f, poisson_tree(g, h, ch), pt) + poisson(g, poisson_tree(h, f, ch), pt)
           + poisson(h, poisson_tree(f, g, ch), pt))
    scale = max(abs(poisson(f, poisson_tree(g, h, ch), pt)), 1.0)
    assert abs(jac) / scale < 1e-8


def test_free_particle_symmetries():
    h = E["px"] ** 2 + E["py"] ** 2
    for pt in sample_points(EUCLIDEAN, 9, 20):
        for L in (E["px"], E["py"], E["M"]):
            assert abs(poisson(h, L, pt)) < 1e-12
    _, _, _, j1, j2, j3 = sphere_functions()
    hs = S["ptheta"] ** 2 + S["pphi"] ** 2 / (sin(S["theta"]) ** 2)
    for pt in sample_points(SPHERE, 9, 20):
        for L in (j1, j2, j3):
            assert abs(poisson(hs, L, pt)) < 1e-9 * (1 + abs(evaluate(hs, pt)))


# -- sampling -----------------------------------------------------------------

def test_sampling_is_deterministic():
    a = sample_points(EUCLIDEAN, 1, 1)
    assert a == sample_points(EUCLIDEAN, 1, 1)
    assert all(np.isfinite(a[0].as_tuple()))


def test_sampling_respects_exclusions():
    pts = sample_points(EUCLIDEAN, 1, 200, [var("x")], box=0.3)
    assert min(abs(p.q1) for p in pts) >= 0.05
    pts = sample_points(SPHERE, 1, 100)
    assert min(abs(np.sin(p.q1)) for p in pts) >= 0.05


def test_sampling_rejection_limit():
    with pytest.raises(RuntimeError, match="99%"):
        sample_points(EUCLIDEAN, 1, 5, [const(Fraction(1, 1000))])


def test_sampling_component_box():
    pts = sample_points(EUCLIDEAN, 3, 50)
    comps = np.array([p.as_tuple() for p in pts])
    assert np.abs(comps.real).max() <= 2 and np.abs(comps.imag).max() <= 2


# -- parsing ------------------------------------------------------------------

def test_parse_polynomial_without_parameters():
    from superint.phase import parameters_of
    assert parameters_of(P("x^2+y^2")) == set()


def test_parse_e4_potential():
    from superint.phase import parameters_of
    e = P("a*(x+i*y)")
    assert parameters_of(e) == {"a"}
    pt = PhasePoint(EUCLIDEAN, 1, 2, 0, 0)
    assert evaluate(e, pt, {"a": 2}) == 2 * (1 + 2j)


def test_parse_error_position():
    with pytest.raises(ExpressionSyntaxError) as err:
        P("x+*y")
    assert err.value.position == 3


def test_parse_rejects_unknown_character():
    with pytest.raises(ExpressionSyntaxError):
        P("x $ y")
