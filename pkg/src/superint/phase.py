"""Observables on complex phase space, order-2 jets and Poisson brackets.

An :class:`Observable` is an immutable expression tree.  Evaluating it at a
:class:`PhasePoint` in forward mode yields a :class:`Jet2` carrying the value,
the gradient and the Hessian with respect to ``(q1, q2, p1, p2)``.

Bracket convention, used everywhere in the package::

    {F, G} = sum_i dF/dp_i * dG/dq_i - dF/dq_i * dG/dp_i

so that ``{p_x, x} = 1``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .exact import GaussC

__all__ = [
    "Chart", "EUCLIDEAN", "SPHERE", "PhasePoint", "Observable", "Jet2", "compile_observables",
    "EvaluationError", "const", "var", "param", "sqrt", "sin", "cos",
    "eval_jet", "evaluate", "poisson", "poisson_terms", "sphere_functions",
    "euclidean_functions", "sample_points", "diff", "substitute",
    "singular_subexpressions", "parameters_of", "compile_observable",
]


class EvaluationError(ArithmeticError):
    """Raised when an observable is evaluated at one of its singularities."""


@dataclass(frozen=True)
class Chart:
    """A canonical chart: two configuration coordinates and their momenta."""

    label: str
    names: tuple[str, str, str, str]

    @property
    def coordinates(self) -> tuple[str, str]:
        return self.names[:2]

    @property
    def momenta(self) -> tuple[str, str]:
        return self.names[2:]

    def slot(self, name: str) -> int:
        return self.names.index(name)


EUCLIDEAN = Chart("EuclideanCartesian", ("x", "y", "px", "py"))
SPHERE = Chart("SphereAngles", ("theta", "phi", "ptheta", "pphi"))


def family_chart(u: str = "u", v: str = "v") -> Chart:
    """Chart used for coordinate-family forward maps (no momenta needed)."""
    return Chart(f"Family({u},{v})", (u, v, f"p{u}", f"p{v}"))


@dataclass(frozen=True)
class PhasePoint:
    chart: Chart
    q1: complex
    q2: complex
    p1: complex
    p2: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.q1, self.q2, self.p1, self.p2)

    def with_momenta(self, p1: complex, p2: complex) -> "PhasePoint":
        return PhasePoint(self.chart, self.q1, self.q2, p1, p2)

    def shifted(self, slot: int, h: complex) -> "PhasePoint":
        vals = list(self.as_tuple())
        vals[slot] += h
        return PhasePoint(self.chart, *vals)


# -- expression trees -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Observable:
    """Expression-tree node.

    ``op`` is one of ``const``, ``param``, ``var``, ``add``, ``sub``, ``mul``,
    ``div``, ``pow`` (integer exponent in ``data``), ``neg``, ``sqrt``,
    ``sin``, ``cos``.  Constants are exact :class:`GaussC` values.
    """

    op: str
    args: tuple = ()
    data: object = None
    _h: int = field(default=0, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((self.op, self.data, tuple(a._h for a in self.args))))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if not isinstance(other, Observable):
            return NotImplemented
        if self is other:
            return True
        return (self._h == other._h and self.op == other.op and self.data == other.data
                and self.args == other.args)

    # arithmetic sugar
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    def __repr__(self):
        return f"Observable({to_text(self)})"


def _lift(x) -> Observable:
    if isinstance(x, Observable):
        return x
    if isinstance(x, complex):
        raise TypeError("inexact complex constants are not allowed in observables")
    return const(x)


def const(value) -> Observable:
    return Observable("const", (), GaussC.coerce(value))


def var(name: str) -> Observable:
    return Observable("var", (), name)


def param(name: str) -> Observable:
    return Observable("param", (), name)


def _is_const(e: Observable, value=None) -> bool:
    return e.op == "const" and (value is None or e.data == value)


# Constructors fold trivial constants; no further simplification is attempted.

def add(a: Observable, b: Observable) -> Observable:
    if _is_const(a) and _is_const(b):
        return const(a.data + b.data)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Observable("add", (a, b))


def sub(a: Observable, b: Observable) -> Observable:
    if _is_const(a) and _is_const(b):
        return const(a.data - b.data)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    return Observable("sub", (a, b))


def mul(a: Observable, b: Observable) -> Observable:
    if _is_const(a) and _is_const(b):
        return const(a.data * b.data)
    if _is_const(a, 0) or _is_const(b, 0):
        return const(0)
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Observable("mul", (a, b))


def div(a: Observable, b: Observable) -> Observable:
    if _is_const(b, 0):
        raise ZeroDivisionError("division by the constant zero")
    if _is_const(a) and _is_const(b):
        return const(a.data / b.data)
    if _is_const(a, 0):
        return const(0)
    if _is_const(b, 1):
        return a
    return Observable("div", (a, b))


def neg(a: Observable) -> Observable:
    if _is_const(a):
        return const(-a.data)
    if a.op == "neg":
        return a.args[0]
    return Observable("neg", (a,))


def power(a: Observable, n: int) -> Observable:
    if not isinstance(n, int):
        raise TypeError("only integer powers are supported; use sqrt")
    if n == 0:
        return const(1)
    if n == 1:
        return a
    if _is_const(a):
        return const(a.data ** n)
    return Observable("pow", (a,), n)


def sqrt(a: Observable) -> Observable:
    return Observable("sqrt", (_lift(a),))


def sin(a: Observable) -> Observable:
    return Observable("sin", (_lift(a),))


def cos(a: Observable) -> Observable:
    return Observable("cos", (_lift(a),))


def _walk(e: Observable, seen: set | None = None):
    """Post-order traversal over unique nodes."""
    seen = set() if seen is None else seen
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            yield node
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        for a in reversed(node.args):
            if a not in seen:
                stack.append((a, False))


def parameters_of(e: Observable) -> set[str]:
    return {n.data for n in _walk(e) if n.op == "param"}


def variables_of(e: Observable) -> set[str]:
    return {n.data for n in _walk(e) if n.op == "var"}


def singular_subexpressions(e: Observable) -> list[Observable]:
    """Divisors, negative-power bases and square-root arguments of ``e``."""
    out = []
    for n in _walk(e):
        if n.op == "div":
            cand = n.args[1]
        elif n.op == "pow" and n.data < 0:
            cand = n.args[0]
        elif n.op == "sqrt":
            cand = n.args[0]
        else:
            continue
        if cand.op != "const" and cand not in out:
            out.append(cand)
    return out


def sqrt_arguments(e: Observable) -> list[Observable]:
    return [n.args[0] for n in _walk(e) if n.op == "sqrt" and n.args[0].op != "const"]


def substitute(e: Observable, mapping: Mapping[str, Observable], kind: str = "var") -> Observable:
    """Replace ``var`` (or ``param``) leaves by the given subtrees."""
    memo: dict[Observable, Observable] = {}
    for n in _walk(e):
        if n.op == kind and n.data in mapping:
            memo[n] = mapping[n.data]
        elif not n.args:
            memo[n] = n
        else:
            memo[n] = _rebuild(n, [memo[a] for a in n.args])
    return memo[e]


def _rebuild(n: Observable, args: list[Observable]) -> Observable:
    op = n.op
    if op == "add":
        return add(*args)
    if op == "sub":
        return sub(*args)
    if op == "mul":
        return mul(*args)
    if op == "div":
        return div(*args)
    if op == "neg":
        return neg(args[0])
    if op == "pow":
        return power(args[0], n.data)
    return Observable(op, tuple(args), n.data)


def diff(e: Observable, name: str) -> Observable:
    """Symbolic derivative with respect to the variable ``name``."""
    memo: dict[Observable, Observable] = {}
    zero = const(0)
    for n in _walk(e):
        op = n.op
        if op == "var":
            memo[n] = const(1) if n.data == name else zero
        elif op in ("const", "param"):
            memo[n] = zero
        elif op == "add":
            memo[n] = add(memo[n.args[0]], memo[n.args[1]])
        elif op == "sub":
            memo[n] = sub(memo[n.args[0]], memo[n.args[1]])
        elif op == "neg":
            memo[n] = neg(memo[n.args[0]])
        elif op == "mul":
            a, b = n.args
            memo[n] = add(mul(memo[a], b), mul(a, memo[b]))
        elif op == "div":
            a, b = n.args
            da, db = memo[a], memo[b]
            if _is_const(db, 0):
                memo[n] = div(da, b)
            else:
                memo[n] = div(sub(mul(da, b), mul(a, db)), power(b, 2))
        elif op == "pow":
            a = n.args[0]
            memo[n] = mul(mul(const(n.data), power(a, n.data - 1)), memo[a])
        elif op == "sqrt":
            a = n.args[0]
            memo[n] = div(memo[a], mul(const(2), n))
        elif op == "sin":
            memo[n] = mul(cos(n.args[0]), memo[n.args[0]])
        elif op == "cos":
            memo[n] = neg(mul(sin(n.args[0]), memo[n.args[0]]))
        else:
            raise ValueError(f"unknown node {op}")
    return memo[e]


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def to_text(e: Observable) -> str:
    """Render in the textual expression syntax (re-parseable)."""
    op = e.op
    if op == "const":
        s = str(e.data)
        return f"({s})" if any(c in s[1:] for c in "+-/") or s.startswith("-") else s
    if op in ("var", "param"):
        return e.data
    if op in ("sqrt", "sin", "cos"):
        return f"{op}({to_text(e.args[0])})"

    def wrap(child, min_prec):
        t = to_text(child)
        return f"({t})" if _PREC.get(child.op, 9) < min_prec else t

    if op == "neg":
        return "-" + wrap(e.args[0], 4)
    if op == "pow":
        return f"{wrap(e.args[0], 5)}^{e.data}" if e.data >= 0 else f"{wrap(e.args[0], 5)}^({e.data})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[op]
    p = _PREC[op]
    right_min = p + 1 if op in ("sub", "div") else p
    return f"{wrap(e.args[0], p)}{sym}{wrap(e.args[1], right_min)}"


# -- jets -------------------------------------------------------------------

@dataclass(frozen=True)
class Jet2:
    """Value, gradient (4,) and symmetric Hessian (4, 4) of an observable."""

    value: complex
    grad: np.ndarray
    hess: np.ndarray

    @classmethod
    def constant(cls, v: complex) -> "Jet2":
        return cls(complex(v), np.zeros(4, complex), np.zeros((4, 4), complex))

    @classmethod
    def variable(cls, v: complex, slot: int) -> "Jet2":
        g = np.zeros(4, complex)
        g[slot] = 1.0
        return cls(complex(v), g, np.zeros((4, 4), complex))

    def __add__(self, o: "Jet2") -> "Jet2":
        return Jet2(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    def __sub__(self, o: "Jet2") -> "Jet2":
        return Jet2(self.value - o.value, self.grad - o.grad, self.hess - o.hess)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, o: "Jet2") -> "Jet2":
        outer = np.outer(self.grad, o.grad)
        return Jet2(self.value * o.value,
                    self.value * o.grad + o.value * self.grad,
                    self.value * o.hess + o.value * self.hess + outer + outer.T)

    def apply(self, f0: complex, f1: complex, f2: complex) -> "Jet2":
        """Chain rule for a scalar function with derivatives f1, f2 at value."""
        return Jet2(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))


def _node_label(n: Observable) -> str:
    t = to_text(n)
    return t if len(t) <= 60 else t[:57] + "..."


def eval_jet(f: Observable, pt: PhasePoint, params: Mapping[str, complex] | None = None) -> Jet2:
    """Forward-mode evaluation of ``f`` through second order at ``pt``."""
    params = params or {}
    vals = pt.as_tuple()
    memo: dict[Observable, Jet2] = {}
    for n in _walk(f):
        op = n.op
        if op == "const":
            memo[n] = Jet2.constant(complex(n.data))
        elif op == "param":
            if n.data not in params:
                raise KeyError(f"unbound parameter {n.data!r}")
            memo[n] = Jet2.constant(complex(params[n.data]))
        elif op == "var":
            try:
                slot = pt.chart.slot(n.data)
            except ValueError:
                raise KeyError(f"variable {n.data!r} is not a coordinate of {pt.chart.label}") from None
            memo[n] = Jet2.variable(vals[slot], slot)
        elif op == "add":
            memo[n] = memo[n.args[0]] + memo[n.args[1]]
        elif op == "sub":
            memo[n] = memo[n.args[0]] - memo[n.args[1]]
        elif op == "mul":
            memo[n] = memo[n.args[0]] * memo[n.args[1]]
        elif op == "neg":
            memo[n] = -memo[n.args[0]]
        elif op == "div":
            b = memo[n.args[1]]
            v = b.value
            if v == 0:
                raise EvaluationError(f"zero divisor in {_node_label(n)}")
            memo[n] = memo[n.args[0]] * b.apply(1 / v, -1 / v ** 2, 2 / v ** 3)
        elif op == "pow":
            a, k = memo[n.args[0]], n.data
            v = a.value
            if v == 0 and k < 0:
                raise EvaluationError(f"negative power of zero in {_node_label(n)}")
            f1 = k * v ** (k - 1) if k != 1 else 1.0
            f2 = k * (k - 1) * v ** (k - 2) if k not in (1, 2) else (2.0 if k == 2 else 0.0)
            memo[n] = a.apply(v ** k, f1, f2)
        elif op == "sqrt":
            a = memo[n.args[0]]
            if a.value == 0:
                raise EvaluationError(f"square root at its branch point in {_node_label(n)}")
            s = cmath.sqrt(a.value)
            memo[n] = a.apply(s, 0.5 / s, -0.25 / s ** 3)
        elif op == "sin":
            a = memo[n.args[0]]
            memo[n] = a.apply(cmath.sin(a.value), cmath.cos(a.value), -cmath.sin(a.value))
        elif op == "cos":
            a = memo[n.args[0]]
            memo[n] = a.apply(cmath.cos(a.value), -cmath.sin(a.value), -cmath.cos(a.value))
        else:
            raise ValueError(f"unknown node {op}")
    return memo[f]


def evaluate(f: Observable, pt: PhasePoint, params: Mapping[str, complex] | None = None) -> complex:
    """Value only (no derivatives)."""
    params = params or {}
    vals = pt.as_tuple()
    memo: dict[Observable, complex] = {}
    for n in _walk(f):
        op = n.op
        if op == "const":
            memo[n] = complex(n.data)
        elif op == "param":
            if n.data not in params:
                raise KeyError(f"unbound parameter {n.data!r}")
            memo[n] = complex(params[n.data])
        elif op == "var":
            memo[n] = vals[pt.chart.slot(n.data)]
        else:
            a = [memo[x] for x in n.args]
            memo[n] = _apply_scalar(n, a)
    return memo[f]


def _apply_scalar(n: Observable, a: list[complex]) -> complex:
    op = n.op
    if op == "add":
        return a[0] + a[1]
    if op == "sub":
        return a[0] - a[1]
    if op == "mul":
        return a[0] * a[1]
    if op == "neg":
        return -a[0]
    if op == "div":
        if a[1] == 0:
            raise EvaluationError(f"zero divisor in {_node_label(n)}")
        return a[0] / a[1]
    if op == "pow":
        if a[0] == 0 and n.data < 0:
            raise EvaluationError(f"negative power of zero in {_node_label(n)}")
        return a[0] ** n.data
    if op == "sqrt":
        if a[0] == 0:
            raise EvaluationError(f"square root at its branch point in {_node_label(n)}")
        return cmath.sqrt(a[0])
    if op == "sin":
        return cmath.sin(a[0])
    if op == "cos":
        return cmath.cos(a[0])
    raise ValueError(f"unknown node {op}")


def max_node_magnitude(f: Observable, pt: PhasePoint, params: Mapping[str, complex] | None = None) -> float:
    """Largest |value| over every subexpression: the scale used to normalize
    residuals of expressions that cancel internally."""
    params = params or {}
    vals = pt.as_tuple()
    memo: dict[Observable, complex] = {}
    for n in _walk(f):
        op = n.op
        if op == "const":
            memo[n] = complex(n.data)
        elif op == "param":
            memo[n] = complex(params[n.data])
        elif op == "var":
            memo[n] = vals[pt.chart.slot(n.data)]
        else:
            memo[n] = _apply_scalar(n, [memo[x] for x in n.args])
    return max(abs(v) for v in memo.values())


def poisson_terms(fj: Jet2, gj: Jet2) -> list[complex]:
    """The four products making up {F, G} under the package convention."""
    return [fj.grad[2 + i] * gj.grad[i] for i in range(2)] + \
           [-fj.grad[i] * gj.grad[2 + i] for i in range(2)]


def poisson(f: Observable, g: Observable, pt: PhasePoint,
            params: Mapping[str, complex] | None = None) -> complex:
    """{f, g} at ``pt``: sum_i df/dp_i dg/dq_i - df/dq_i dg/dp_i."""
    return sum(poisson_terms(eval_jet(f, pt, params), eval_jet(g, pt, params)))


def poisson_tree(f: Observable, g: Observable, chart: Chart) -> Observable:
    """{f, g} as an expression tree (used for nested brackets)."""
    q1, q2, p1, p2 = chart.names
    return (diff(f, p1) * diff(g, q1) + diff(f, p2) * diff(g, q2)
            - diff(f, q1) * diff(g, p1) - diff(f, q2) * diff(g, p2))


# -- standard functions on the two charts -----------------------------------

def euclidean_functions() -> dict[str, Observable]:
    """x, y, p_x, p_y, M = x p_y - y p_x and the null combinations."""
    x, y, px, py = (var(n) for n in EUCLIDEAN.names)
    i = const(GaussC(0, 1))
    return {
        "x": x, "y": y, "px": px, "py": py,
        "M": x * py - y * px,
        "z": x + i * y, "zbar": x - i * y,
        "pplus": px + i * py, "pminus": px - i * py,
    }


def sphere_functions() -> tuple[Observable, ...]:
    """x, y, z, J1, J2, J3 pulled back to the (theta, phi) chart.

    The J's are the rotation generators written in induced momenta:
    J3 = p_phi, J1 = -sin(phi) p_theta - cot(theta) cos(phi) p_phi,
    J2 = cos(phi) p_theta - cot(theta) sin(phi) p_phi.
    """
    th, ph, pth, pph = (var(n) for n in SPHERE.names)
    st, ct, sp, cp = sin(th), cos(th), sin(ph), cos(ph)
    x, y, z = st * cp, st * sp, ct
    cot = ct / st
    j1 = -(sp * pth) - cot * cp * pph
    j2 = cp * pth - cot * sp * pph
    j3 = pph
    return x, y, z, j1, j2, j3


def sphere_environment() -> dict[str, Observable]:
    x, y, z, j1, j2, j3 = sphere_functions()
    i = const(GaussC(0, 1))
    env = {n: var(n) for n in SPHERE.names}
    env.update({"x": x, "y": y, "z": z, "w": x + i * y, "wbar": x - i * y,
                "J1": j1, "J2": j2, "J3": j3})
    return env


def euclidean_environment() -> dict[str, Observable]:
    return euclidean_functions()


# -- sampling ---------------------------------------------------------------

EXCLUSION_RADIUS = 0.05


def sample_points(chart: Chart, seed: int, n: int,
                  exclusions: Sequence[Observable] = (),
                  params: Mapping[str, complex] | None = None,
                  box: float = 2.0,
                  real: bool = False) -> list[PhasePoint]:
    """Deterministic complex sample points avoiding small exclusion values.

    Real and imaginary parts are uniform in ``[-box, box]``.  On the sphere
    chart sin(theta) is always excluded.  ``real=True`` zeroes imaginary parts.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    excl = list(exclusions)
    if chart == SPHERE:
        excl.append(sin(var("theta")))
    accepted: list[PhasePoint] = []
    tries = 0
    while len(accepted) < n:
        tries += 1
        re_part = rng.uniform(-box, box, 4)
        im_part = np.zeros(4) if real else rng.uniform(-box, box, 4)
        comps = [complex(a, b) for a, b in zip(re_part, im_part)]
        pt = PhasePoint(chart, *comps)
        ok = True
        for e in excl:
            try:
                if abs(evaluate(e, pt, params)) < EXCLUSION_RADIUS:
                    ok = False
                    break
            except (EvaluationError, ZeroDivisionError, OverflowError):
                ok = False
                break
        if ok:
            accepted.append(pt)
        if tries >= 100 and len(accepted) < tries / 100:
            raise RuntimeError("sample rejection rate above 99%: exclusion set too aggressive")
    return accepted


# -- compiled evaluation ----------------------------------------------------

def compile_observable(e: Observable, chart: Chart,
                       params: Mapping[str, complex] | None = None) -> Callable[..., complex]:
    """Straight-line Python function f(q1, q2, p1, p2) -> complex.

    Common subexpressions are emitted once.  Used on hot paths (integration);
    raises ZeroDivisionError/ValueError on singular input.
    """
    f = compile_observables([e], chart, params)
    return lambda q1, q2, p1, p2: f(q1, q2, p1, p2)[0]


def compile_observables(exprs: Sequence[Observable], chart: Chart,
                        params: Mapping[str, complex] | None = None) -> Callable[..., tuple]:
    """Like compile_observable for several outputs sharing subexpressions."""
    params = params or {}
    names: dict[Observable, str] = {}
    lines: list[str] = []
    slot_names = ("q1", "q2", "p1", "p2")
    consts: dict[str, complex] = {}
    k = 0
    seen: set = set()
    for root in exprs:
        for n in _walk(root, seen):
            k += 1
            op = n.op
            if op == "const":
                expr = f"_c{k}"
                consts[expr] = complex(n.data)
            elif op == "param":
                if n.data not in params:
                    raise KeyError(f"unbound parameter {n.data!r}")
                expr = f"_c{k}"
                consts[expr] = complex(params[n.data])
            elif op == "var":
                expr = slot_names[chart.slot(n.data)]
            else:
                a = [names[x] for x in n.args]
                expr = {
                    "add": lambda: f"{a[0]} + {a[1]}",
                    "sub": lambda: f"{a[0]} - {a[1]}",
                    "mul": lambda: f"{a[0]} * {a[1]}",
                    "div": lambda: f"{a[0]} / {a[1]}",
                    "neg": lambda: f"-{a[0]}",
                    "pow": lambda: f"{a[0]} ** {n.data}",
                    "sqrt": lambda: f"_sqrt({a[0]})",
                    "sin": lambda: f"_sin({a[0]})",
                    "cos": lambda: f"_cos({a[0]})",
                }[op]()
            if op in ("const", "param", "var"):
                names[n] = expr
            else:
                t = f"t{k}"
                lines.append(f"    {t} = {expr}")
                names[n] = t
    body = "\n".join(lines) if lines else "    pass"
    out = ", ".join(names[e] for e in exprs)
    src = f"def _f(q1, q2, p1, p2):\n{body}\n    return ({out},)\n"
    ns = {"_sqrt": cmath.sqrt, "_sin": cmath.sin, "_cos": cmath.cos, **consts}
    exec(compile(src, "<observable>", "exec"), ns)
    return ns["_f"]
