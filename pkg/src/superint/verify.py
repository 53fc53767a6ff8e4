"""Numerical and exact checks on the catalog.

Residuals are normalized as ``|r| / (1 + m)`` where ``m`` is the largest
magnitude among the terms that should cancel at that point.  Complex
sample points make absolute scales swing by orders of magnitude, so an
unnormalized tolerance would be meaningless.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate

from . import catalog
from .exact import GaussC
from .catalog import EUCLIDEAN_SPACE, SPHERE_SPACE, BoundSystem, Erratum, Relation, bind
from .orbits import OrbitClassE2, OrbitClassS2, separability_classes
from .parse import parse_expression
from .phase import (EXCLUSION_RADIUS, Chart, EvaluationError, Jet2, Observable, PhasePoint, const, diff,
                    eval_jet, evaluate, family_chart, max_node_magnitude, parameters_of, poisson_terms, sin, sqrt_arguments,
                    sample_points, singular_subexpressions, var)

CONSERVATION_TOL = 1e-9
INTEGRABILITY_TOL = 1e-8
RELATION_TOL = 1e-9
RANK_THRESHOLD = 1e-8
PATH_TOL = 1e-7
RETRY_SEED_OFFSET = 7919


class VerificationError(RuntimeError):
    pass


# -- reports ----------------------------------------------------------------

@dataclass
class CheckRecord:
    name: str
    residual: float | int | list
    tolerance: float | int
    passed: bool
    seed: int
    points: int

    def to_json(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tolerance": self.tolerance,
                "pass": bool(self.passed), "seed": self.seed, "points": self.points}


@dataclass
class VerificationReport:
    system: str
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"system": self.system, "checks": [c.to_json() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _below(residual: float, tol: float) -> bool:
    return bool(np.isfinite(residual) and residual < tol)


# -- sampling ---------------------------------------------------------------

def system_points(system: BoundSystem, seed: int, n: int,
                  extra: Sequence[Observable] = ()) -> list[PhasePoint]:
    """Seeded points avoiding every divisor and sqrt argument of the system."""
    return sample_points(system.chart, seed, n, list(system.singular_set()) + list(extra),
                         system.numeric_params)


def _with_retry(fn: Callable[[list[PhasePoint]], float], system: BoundSystem,
                seed: int, n: int) -> tuple[float, int]:
    """Run ``fn`` on seeded points; on a singular evaluation retry once with fresh ones."""
    last = None
    for s in (seed, seed + RETRY_SEED_OFFSET):
        try:
            return fn(system_points(system, s, n)), s
        except (EvaluationError, np.linalg.LinAlgError) as err:
            last = err
    raise VerificationError(f"{system.id}: singular evaluation after retry: {last}")


# -- conservation -------------------------------------------------------------

def bracket_residual(f: Observable, g: Observable, expected: Observable | None,
                     pt: PhasePoint, params: Mapping[str, complex]) -> float:
    """|{f, g} - expected| / (1 + largest participating magnitude)."""
    terms = poisson_terms(eval_jet(f, pt, params), eval_jet(g, pt, params))
    value = sum(terms)
    scale = max(abs(t) for t in terms)
    if expected is not None:
        value -= evaluate(expected, pt, params)
        scale = max(scale, max_node_magnitude(expected, pt, params))
    return abs(value) / (1 + scale)


def check_conservation(system: BoundSystem, constant: str | Observable,
                       points: Iterable[PhasePoint]) -> float:
    """max normalized |{H, A}| over ``points``."""
    a = system.observable(constant) if isinstance(constant, str) else constant
    h = system.hamiltonian
    return max(bracket_residual(h, a, None, p, system.numeric_params) for p in points)


# -- the forced gradient of the scalar part -----------------------------------

def _basis_momenta(pt: PhasePoint, k: int) -> PhasePoint:
    return pt.with_momenta(1.0 if k == 0 else 0.0, 1.0 if k == 1 else 0.0)


@dataclass(frozen=True)
class GradientField:
    """The gradient that a scalar part d must have for A' + d to be conserved.

    {T, d} + {V, A'} = 0 is linear in the momenta, so evaluating it at
    p = e_1 and p = e_2 gives N grad d = b with
    N_kj = dT/dp_j (q, e_k) and b_k = sum_i d_iV dA'/dp_i (q, e_k).
    q-derivatives of N and b need only order-2 jets of V, A' and T.
    """

    system: BoundSystem
    leading: Observable

    def _pieces(self, pt: PhasePoint):
        params = self.system.numeric_params
        vj = eval_jet(self.system.potential, pt, params)
        n = np.zeros((2, 2), complex)
        dn = np.zeros((2, 2, 2), complex)  # dn[m, k, j] = d_m N_kj
        b = np.zeros(2, complex)
        db = np.zeros((2, 2), complex)  # db[m, k]
        for k in range(2):
            ek = _basis_momenta(pt, k)
            aj = eval_jet(self.leading, ek, params)
            tj = eval_jet(self.system.kinetic, ek, params)
            for j in range(2):
                n[k, j] = tj.grad[2 + j]
                for m in range(2):
                    dn[m, k, j] = tj.hess[m, 2 + j]
            for i in range(2):
                a_ik = aj.grad[2 + i]
                b[k] += vj.grad[i] * a_ik
                for m in range(2):
                    db[m, k] += vj.hess[m, i] * a_ik + vj.grad[i] * aj.hess[m, 2 + i]
        return n, dn, b, db

    def _solve(self, n: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        det = n[0, 0] * n[1, 1] - n[0, 1] * n[1, 0]
        if abs(det) < 1e-12 * (1 + np.abs(n).max() ** 2):
            raise np.linalg.LinAlgError("degenerate kinetic system at this point")
        return np.linalg.solve(n, rhs)

    def gradient(self, pt: PhasePoint) -> np.ndarray:
        n, _, b, _ = self._pieces(pt)
        return self._solve(n, b)

    def gradient_jet(self, pt: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
        """(g, dg) with g_j = d_j d and dg[m, j] = d_m d_j d."""
        n, dn, b, db = self._pieces(pt)
        g = self._solve(n, b)
        dg = np.array([self._solve(n, db[m] - dn[m] @ g) for m in range(2)])
        return g, dg

    def curl(self, pt: PhasePoint) -> float:
        """Normalized mixed-partial mismatch d_2(d_1 d) - d_1(d_2 d)."""
        _, dg = self.gradient_jet(pt)
        return abs(dg[1, 0] - dg[0, 1]) / (1 + np.abs(dg).max())


def _leading_of(system: BoundSystem, leading) -> Observable:
    if isinstance(leading, str):
        return system.leading_observable(leading)
    if isinstance(leading, Observable):
        return leading
    return quad_observable(system, leading)


def quad_observable(system: BoundSystem, q) -> Observable:
    """A QuadE2 / QuadS2 as a phase-space observable."""
    terms, _ = catalog._sym_terms(system.space)
    coeffs = q.cartesian() if system.space == EUCLIDEAN_SPACE else q.entries()
    out = const(GaussC(0))
    for c, t in zip(coeffs, terms):
        if c:
            out = out + const(c) * t
    return out


def d_gradient(system: BoundSystem, leading, pt: PhasePoint) -> tuple[complex, complex]:
    """Gradient of the scalar part forced by leading part ``leading`` at ``pt``."""
    g = GradientField(system, _leading_of(system, leading)).gradient(pt)
    return complex(g[0]), complex(g[1])


def check_integrability(system: BoundSystem, leading, points: Iterable[PhasePoint]) -> float:
    """max normalized curl of the forced gradient: ~0 iff the scalar part exists."""
    field_ = GradientField(system, _leading_of(system, leading))
    return max(field_.curl(p) for p in points)


def _line_integral(field_: GradientField, chart: Chart, start: Sequence[complex],
                   end: Sequence[complex]) -> complex:
    q0 = np.array(start, complex)
    dq = np.array(end, complex) - q0
    if not dq.any():
        return 0j

    def integrand(t: float) -> complex:
        q = q0 + t * dq
        g = field_.gradient(PhasePoint(chart, q[0], q[1], 0, 0))
        return complex(g @ dq)

    opts = dict(epsabs=1e-13, epsrel=1e-11, limit=200)
    re, _ = integrate.quad(lambda t: integrand(t).real, 0.0, 1.0, **opts)
    im, _ = integrate.quad(lambda t: integrand(t).imag, 0.0, 1.0, **opts)
    return complex(re, im)


def reconstruct_d(system: BoundSystem, leading, anchor: PhasePoint, target: PhasePoint,
                  path: str = "straight") -> complex:
    """d(target) - d(anchor) by quadrature of the forced gradient.

    ``path`` is ``straight``, ``q1-first`` or ``q2-first`` (staircase legs).
    """
    field_ = GradientField(system, _leading_of(system, leading))
    a, b = (anchor.q1, anchor.q2), (target.q1, target.q2)
    if path == "straight":
        legs = [(a, b)]
    elif path == "q1-first":
        legs = [(a, (b[0], a[1])), ((b[0], a[1]), b)]
    elif path == "q2-first":
        legs = [(a, (a[0], b[1])), ((a[0], b[1]), b)]
    else:
        raise ValueError(f"unknown path {path!r}")
    try:
        return sum(_line_integral(field_, system.chart, s, e) for s, e in legs)
    except (EvaluationError, np.linalg.LinAlgError) as err:
        raise VerificationError(f"path crosses a singularity ({err}); choose a different anchor") from None


PATH_STEP = 0.4
_GRID = 17


def _homotopy_clear(system: BoundSystem, anchor: PhasePoint, target: PhasePoint) -> bool:
    """True if the rectangle swept between the two staircase paths is clean.

    Over a grid on {(a1 + t d1, a2 + s d2)} every divisor stays away from
    zero and no square-root argument crosses the principal branch cut, so
    the two staircases are homotopic through the domain of the integrand.
    """
    divisors = list(system.singular_set())
    if system.space == SPHERE_SPACE:
        divisors.append(sin(var("theta")))
    roots = [a for a in sqrt_arguments(system.potential)]
    params = system.numeric_params
    ts = np.linspace(0.0, 1.0, _GRID)
    prev_row = None
    for t in ts:
        row = []
        for u in ts:
            pt = PhasePoint(system.chart, anchor.q1 + t * (target.q1 - anchor.q1),
                            anchor.q2 + u * (target.q2 - anchor.q2), 0, 0)
            try:
                if any(abs(evaluate(e, pt, params)) < EXCLUSION_RADIUS for e in divisors):
                    return False
                row.append([evaluate(a, pt, params) for a in roots])
            except EvaluationError:
                return False
        for j in range(len(row)):
            nbrs = [row[j - 1]] if j else []
            if prev_row is not None:
                nbrs.append(prev_row[j])
            for nb in nbrs:
                for a, b in zip(row[j], nb):
                    if (a.real < 0 or b.real < 0) and (a.imag >= 0) != (b.imag >= 0):
                        return False
        prev_row = row
    return True


def path_pair(system: BoundSystem, seed: int, tries: int = 200) -> tuple[PhasePoint, PhasePoint, int]:
    """Seeded anchor/target whose staircase paths are homotopic in the domain."""
    rng = np.random.default_rng(seed)
    starts = system_points(system, seed, tries)
    for a in starts:
        step = rng.uniform(-PATH_STEP, PATH_STEP, 4)
        b = PhasePoint(system.chart, a.q1 + complex(step[0], step[1]),
                       a.q2 + complex(step[2], step[3]), 0, 0)
        if _homotopy_clear(system, a, b):
            return a, b, seed
    raise VerificationError(f"{system.id}: no clean path pair in {tries} tries")


# -- relations ----------------------------------------------------------------

def relation_residual(system: BoundSystem, relation: Relation, pt: PhasePoint) -> float:
    lhs, rhs = system.relation_observables(relation)
    params = system.numeric_params
    if relation.kind == "bracket":
        return bracket_residual(lhs[0], lhs[1], rhs, pt, params)
    value = evaluate(lhs, pt, params) - evaluate(rhs, pt, params)
    scale = max(max_node_magnitude(lhs, pt, params), max_node_magnitude(rhs, pt, params))
    return abs(value) / (1 + scale)


def check_relation(system: BoundSystem, relation: Relation, points: Iterable[PhasePoint]) -> float:
    lhs, rhs = system.relation_observables(relation)
    free = set().union(*(parameters_of(e) for e in (lhs if isinstance(lhs, tuple) else (lhs,))),
                       parameters_of(rhs)) - set(system.numeric_params)
    if free:
        raise VerificationError(f"{system.id}: unresolved name(s) {', '.join(sorted(free))} "
                                f"in relation {relation.label()}")
    return max(relation_residual(system, relation, p) for p in points)


def check_erratum(system: BoundSystem, erratum: Erratum,
                  points: Sequence[PhasePoint]) -> tuple[float, float]:
    """(printed residual, stored residual) for a recorded erratum."""
    if erratum.target == "relation":
        res = [check_relation(system, Relation("functional", form, "0"), points)
               for form in (erratum.printed, erratum.stored)]
        return res[0], res[1]
    name, _, part = erratum.target.partition(".")
    if part != "d":
        raise ValueError(f"unknown erratum target {erratum.target!r}")
    lead = system.leading_observable(name)
    res = [check_conservation(system, lead + system.parse(form), points)
           for form in (erratum.printed, erratum.stored)]
    return res[0], res[1]


# -- independence -------------------------------------------------------------

def constant_gradient(system: BoundSystem, name: str, pt: PhasePoint) -> np.ndarray:
    """Complex gradient of a constant in (q1, q2, p1, p2).

    For constants whose scalar part is implicit, the q-part of the gradient
    of d comes from the forced gradient field.
    """
    c = system.record.constant(name)
    if c.explicit:
        return eval_jet(system.observable(name), pt, system.numeric_params).grad
    lead = system.leading_observable(name)
    grad = eval_jet(lead, pt, system.numeric_params).grad.copy()
    grad[:2] += GradientField(system, lead).gradient(pt)
    return grad


def independence_rank(system: BoundSystem, names: Sequence[str], pt: PhasePoint,
                      threshold: float = RANK_THRESHOLD) -> int:
    """Numerical rank of the k x 4 complex Jacobian, via its 2k x 8 realification."""
    rows = []
    for n in names:
        g = constant_gradient(system, n, pt)
        rows.append(np.concatenate([g.real, -g.imag]))
        rows.append(np.concatenate([g.imag, g.real]))
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > threshold * s[0])) // 2


# -- Cartesian compatibility condition ----------------------------------------

def compat_terms(f: Observable, h: Observable, D, printed_sign: bool = False) -> list[Observable]:
    """The five terms of the mixed-partial condition for V = f(x) + h(y), A' = M^2 + D p_x p_y.

    Derived form: (f'' + 3f'/x) - (h'' + 3h'/y) = D (f'' - h'') / (2xy), so
    the residual is t0 + t1 - t2 - t3 - t4.  ``printed_sign=True`` uses
    (h'' - f'') on the right instead.
    """
    x, y = var("x"), var("y")
    f1, h1 = diff(f, "x"), diff(h, "y")
    f2, h2 = diff(f1, "x"), diff(h1, "y")
    three = const(3)
    diff_term = (h2 - f2) if printed_sign else (f2 - h2)
    right = const(D) * diff_term / (const(2) * x * y)
    return [f2, three * f1 / x, h2, three * h1 / y, right]


def compat_residual(f: Observable, h: Observable, D, pt: PhasePoint,
                    printed_sign: bool = False) -> complex:
    """Unnormalized residual of the compatibility condition at ``pt``."""
    t = [evaluate(e, pt) for e in compat_terms(f, h, D, printed_sign)]
    return t[0] + t[1] - t[2] - t[3] - t[4]


def check_cartesian_compat(f: Observable, h: Observable, D, points: Iterable[PhasePoint],
                           printed_sign: bool = False) -> float:
    """max normalized residual of the compatibility condition over ``points``."""
    terms = compat_terms(f, h, D, printed_sign)
    worst = 0.0
    for p in points:
        if abs(p.q1) < EXCLUSION_RADIUS or abs(p.q2) < EXCLUSION_RADIUS:
            raise VerificationError("compatibility points must avoid x = 0 and y = 0")
        t = [evaluate(e, p) for e in terms]
        r = t[0] + t[1] - t[2] - t[3] - t[4]
        worst = max(worst, abs(r) / (1 + max(abs(v) for v in t)))
    return worst


def cartesian_compat_points(seed: int, n: int) -> list[PhasePoint]:
    from .phase import EUCLIDEAN
    return sample_points(EUCLIDEAN, seed, n, [var("x"), var("y")])


# -- coordinate families ------------------------------------------------------

@dataclass(frozen=True)
class CoordinateFamilyMap:
    """Forward map from family variables to ambient Cartesian coordinates."""

    label: str
    space: str
    variables: tuple[str, str]
    forward: Mapping[str, str]
    identities: tuple[tuple[str, str], ...]
    params: Mapping[str, complex] = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return family_chart(*self.variables)

    def _env(self) -> dict[str, Observable]:
        u, v = self.variables
        base = {u: var(u), v: var(v)}
        env = {k: parse_expression(t, env=base) for k, t in self.forward.items()}
        i = const(GaussC(0, 1))
        if "x" in env and "y" in env:
            env.setdefault("z" if self.space == EUCLIDEAN_SPACE else "w", env["x"] + i * env["y"])
            bar = "zbar" if self.space == EUCLIDEAN_SPACE else "wbar"
            env.setdefault(bar, env["x"] - i * env["y"])
        env.update(base)
        return env

    @cached_property
    def env(self) -> dict[str, Observable]:
        return self._env()

    def pull_back(self, text: str) -> Observable:
        """An ambient expression (e.g. a potential) in family variables."""
        return parse_expression(text, env=self.env)

    def exclusions(self) -> list[Observable]:
        out = []
        for e in self.env.values():
            out += [s for s in singular_subexpressions(e) if s not in out]
        return out

    def sample(self, seed: int, n: int, extra: Sequence[Observable] = ()) -> list[PhasePoint]:
        return sample_points(self.chart, seed, n, self.exclusions() + list(extra), self.params)

    def identity_residual(self, points: Iterable[PhasePoint]) -> float:
        worst = 0.0
        for lhs, rhs in self.identities:
            a, b = self.pull_back(lhs), self.pull_back(rhs)
            for p in points:
                va, vb = evaluate(a, p, self.params), evaluate(b, p, self.params)
                worst = max(worst, abs(va - vb) / (1 + max(abs(va), abs(vb))))
        return worst


_R = "1/2"  # elliptic modulus used for the sphere family identity checks

_FAMILY_LIST: list[CoordinateFamilyMap] = [
    CoordinateFamilyMap("Cartesian", EUCLIDEAN_SPACE, ("u", "v"), {"x": "u", "y": "v"},
                        (("x", "u"), ("y", "v"))),
    CoordinateFamilyMap("Light Cone", EUCLIDEAN_SPACE, ("u", "v"),
                        {"x": "(u+v)/2", "y": "(u-v)/(2*i)"}, (("z", "u"), ("zbar", "v"))),
    CoordinateFamilyMap("Polar", EUCLIDEAN_SPACE, ("r", "theta"),
                        {"x": "r*cos(theta)", "y": "r*sin(theta)"}, (("x^2+y^2", "r^2"),)),
    CoordinateFamilyMap("Semi-Hyperbolic", EUCLIDEAN_SPACE, ("w", "u"),
                        {"x": "i*(w-u)^2+2*i*(w+u)", "y": "-(w-u)^2+2*(w+u)"},
                        (("z", "4*i*(u+w)"), ("zbar", "2*i*(w-u)^2"))),
    CoordinateFamilyMap("Hyperbolic", EUCLIDEAN_SPACE, ("r", "s"),
                        {"x": "(r^2+s^2+r^2*s^2)/(2*r*s)", "y": "i*(r^2+s^2-r^2*s^2)/(2*r*s)"},
                        (("z", "r*s"), ("zbar", "r/s+s/r"))),
    CoordinateFamilyMap("Parabolic", EUCLIDEAN_SPACE, ("xi", "eta"),
                        {"x": "xi*eta", "y": "(xi^2-eta^2)/2"},
                        (("x^2+y^2", "((xi^2+eta^2)/2)^2"),)),
    CoordinateFamilyMap("Elliptic", EUCLIDEAN_SPACE, ("u", "v"),
                        {"x": "c*sqrt((u-1)*(v-1))", "y": "c*sqrt(-u*v)"},
                        (("u+v", "1-(x^2+y^2)/c^2"), ("u*v", "-y^2/c^2")), {"c": 1.0}),
    CoordinateFamilyMap("Spherical", SPHERE_SPACE, ("theta", "phi"),
                        {"x": "sin(theta)*cos(phi)", "y": "sin(theta)*sin(phi)", "z": "cos(theta)"},
                        (("x^2+y^2+z^2", "1"),)),
    CoordinateFamilyMap("Horospherical", SPHERE_SPACE, ("u", "v"),
                        {"x": "i/2*(v+(u^2-1)/v)", "y": "1/2*(v+(u^2+1)/v)", "z": "i*u/v"},
                        (("x^2+y^2+z^2", "1"), ("wbar", "-i/v"))),
    CoordinateFamilyMap("Elliptic", SPHERE_SPACE, ("u", "v"),
                        {"x": f"sqrt((r*u-1)*(r*v-1)/(1-r))", "y": f"sqrt(r*(u-1)*(v-1)/(r-1))",
                         "z": "sqrt(r*u*v)"},
                        (("x^2+y^2+z^2", "1"), ("z^2", "r*u*v")), {"r": 0.5}),
    CoordinateFamilyMap("Degenerate elliptic 1", SPHERE_SPACE, ("u", "v"),
                        {"x": "(4*u*v/((u^2+1)*(v^2+1))+(u^2*v^2+1)*(u^2+v^2)/(u*v*(u^2+1)*(v^2+1)))/2",
                         "y": "(4*u*v/((u^2+1)*(v^2+1))-(u^2*v^2+1)*(u^2+v^2)/(u*v*(u^2+1)*(v^2+1)))/(2*i)",
                         "z": "(u^2-1)*(v^2-1)/((u^2+1)*(v^2+1))"},
                        (("x^2+y^2+z^2", "1"), ("w", "4*u*v/((u^2+1)*(v^2+1))"))),
    # x - iy carries a factor i: without it x^2+y^2+z^2 = 1 fails
    CoordinateFamilyMap("Degenerate elliptic 2", SPHERE_SPACE, ("u", "v"),
                        {"x": "(-i*u*v+i*(u^2+v^2)^2/(4*u^3*v^3))/2",
                         "y": "(-i*u*v-i*(u^2+v^2)^2/(4*u^3*v^3))/(2*i)",
                         "z": "i/2*(u^2-v^2)/(u*v)"},
                        (("x^2+y^2+z^2", "1"), ("w", "-i*u*v"))),
]
# keyed by (space, label): the Euclidean and sphere elliptic families share a label
FAMILY_MAPS: dict[tuple[str, str], CoordinateFamilyMap] = {(m.space, m.label): m for m in _FAMILY_LIST}


def family_maps() -> list[CoordinateFamilyMap]:
    """All twelve forward maps (seven Euclidean, five sphere)."""
    return list(_FAMILY_LIST)


def family_map(space: str, label: str) -> CoordinateFamilyMap:
    try:
        return FAMILY_MAPS[(_space_key(space), label)]
    except KeyError:
        raise KeyError(f"no coordinate family {label!r} on {space}") from None


# -- separation witnesses -----------------------------------------------------

WITNESS_FAMILIES = ("Cartesian", "LightCone", "Polar", "Horospherical")
_WITNESS = {
    # family -> (map label, space, weight, slots)
    "Cartesian": ("Cartesian", EUCLIDEAN_SPACE, None, (0, 1)),
    "LightCone": ("Light Cone", EUCLIDEAN_SPACE, None, (0, 0)),
    "Polar": ("Polar", EUCLIDEAN_SPACE, "r^2", (0, 1)),
    "Horospherical": ("Horospherical", SPHERE_SPACE, "1/v^2", (0, 1)),
}


def separation_witness(potential: str, family: str, points: Sequence[PhasePoint] | None = None,
                       params: Mapping[str, complex] | None = None,
                       seed: int = 1, n: int = 100) -> float:
    """Second-order witness of the separated form of ``potential`` in ``family``.

    Cartesian d_x d_y V; LightCone d_z^2 V (V affine in z); Polar
    d_r d_theta (r^2 V); Horospherical d_u d_v (V / v^2).  ``potential`` is
    ambient text (x, y, z, zbar / w, wbar).
    """
    if family not in _WITNESS:
        raise ValueError(f"witness not implemented for family {family!r}; "
                         f"supported: {', '.join(WITNESS_FAMILIES)}")
    label, space, weight, (a, b) = _WITNESS[family]
    fam = FAMILY_MAPS[(space, label)]
    w = fam.pull_back(potential)
    if weight is not None:
        w = fam.pull_back(weight) * w
    params = dict(params or {})
    allp = {**fam.params, **params}
    if points is None:
        points = sample_points(fam.chart, seed, n, fam.exclusions() + singular_subexpressions(w), allp)
    worst = 0.0
    for p in points:
        j = eval_jet(w, p, allp)
        worst = max(worst, abs(j.hess[a, b]) / (1 + max(abs(j.value), np.abs(j.hess[:2, :2]).max())))
    return worst


# -- tables -------------------------------------------------------------------

E2_CLASS_ROW = {
    OrbitClassE2.Cartesian: "Cartesian", OrbitClassE2.LightCone: "Light Cone",
    OrbitClassE2.Polar: "Polar", OrbitClassE2.SemiHyperbolic: "Semi-Hyperbolic",
    OrbitClassE2.Hyperbolic: "Hyperbolic", OrbitClassE2.Parabolic: "Parabolic",
    OrbitClassE2.Elliptic: "Elliptic", OrbitClassE2.NonSeparating: "Non-Separating",
}
S2_CLASS_ROW = {
    OrbitClassS2.Spherical: "Spherical", OrbitClassS2.Horospherical: "Horospherical",
    OrbitClassS2.Elliptic: "Elliptic", OrbitClassS2.DegenerateElliptic1: "Degenerate elliptic 1",
    OrbitClassS2.DegenerateElliptic2: "Degenerate elliptic 2",
}


@dataclass(frozen=True)
class MembershipTable:
    """Systems (rows) against separating families (columns)."""

    space: str
    rows: tuple[str, ...]
    columns: tuple[str, ...]
    matrix: tuple[tuple[bool, ...], ...]  # matrix[system][family]

    def to_json(self) -> dict:
        return {"space": self.space, "rows": list(self.rows), "columns": list(self.columns),
                "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, d: dict) -> "MembershipTable":
        return cls(d["space"], tuple(d["rows"]), tuple(d["columns"]),
                   tuple(tuple(bool(x) for x in r) for r in d["matrix"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"

    def classes(self, id_: str) -> list[str]:
        row = self.matrix[self.rows.index(id_)]
        return [c for c, on in zip(self.columns, row) if on]

    def mismatches(self, other: "MembershipTable") -> list[tuple[str, str, bool, bool]]:
        """(system, family, self value, other value) wherever the two differ."""
        if (self.rows, self.columns) != (other.rows, other.columns):
            raise ValueError("tables have different labels")
        return [(r, c, self.matrix[i][j], other.matrix[i][j])
                for i, r in enumerate(self.rows) for j, c in enumerate(self.columns)
                if self.matrix[i][j] != other.matrix[i][j]]

    def markdown(self) -> str:
        head = "| | " + " | ".join(self.columns) + " |"
        sep = "|---|" + "---|" * len(self.columns)
        body = ["| " + r + " | " + " | ".join("x" if v else " " for v in row) + " |"
                for r, row in zip(self.rows, self.matrix)]
        return "\n".join([head, sep] + body) + "\n"


def _space_key(space: str) -> str:
    s = space.lower()
    if s in ("e2", "euclidean"):
        return EUCLIDEAN_SPACE
    if s in ("s2", "sphere"):
        return SPHERE_SPACE
    raise ValueError(f"unknown space {space!r}; use e2 or s2")


def system_classes(system: BoundSystem, seed: int = 0) -> list[str]:
    names = E2_CLASS_ROW if system.space == EUCLIDEAN_SPACE else S2_CLASS_ROW
    found = separability_classes(system.generators(), seed=seed)
    return [names[c] for c in names if c in found]


def _families(space: str) -> tuple[str, ...]:
    return catalog.E2_ROWS if space == EUCLIDEAN_SPACE else catalog.S2_ROWS


def generate_table(space: str, seed: int = 0) -> MembershipTable:
    """Membership matrix regenerated from the classifier."""
    return _generate_table(_space_key(space), seed)


@lru_cache(maxsize=None)
def _generate_table(space: str, seed: int) -> MembershipTable:
    # pure in (space, seed) and the result is frozen, so memoizing is safe
    recs = catalog.systems(space)
    cols = _families(space)
    rows = []
    for r in recs:
        found = set(system_classes(bind(r), seed))
        rows.append(tuple(lab in found for lab in cols))
    return MembershipTable(space, tuple(r.id for r in recs), cols, tuple(rows))


def golden_table(space: str) -> MembershipTable:
    """The stored fixture of the published table."""
    space = _space_key(space)
    name = "table_e2.json" if space == EUCLIDEAN_SPACE else "table_s2.json"
    text = resources.files("superint").joinpath("data", name).read_text()
    return MembershipTable.from_json(json.loads(text))


def catalog_table(space: str) -> MembershipTable:
    """The expected rows as stored in the catalog records."""
    space = _space_key(space)
    recs = catalog.systems(space)
    return MembershipTable(space, tuple(r.id for r in recs), _families(space),
                           tuple(tuple(r.expected_row) for r in recs))


# -- per-system aggregate -----------------------------------------------------

def verify_system(system: BoundSystem | str, samples: int = 100, tol: float = RELATION_TOL,
                  seed: int = 1, rank_points: int = 20) -> VerificationReport:
    """Every per-system check: conservation, existence, relations, errata, independence."""
    if isinstance(system, str):
        system = bind(system)
    rep = VerificationReport(system.id)
    int_tol = max(INTEGRABILITY_TOL, 10 * tol)

    def add(name, fn, tolerance):
        res, used = _with_retry(fn, system, seed, samples)
        rep.checks.append(CheckRecord(name, float(res), tolerance, _below(res, tolerance), used, samples))

    for name in system.explicit_constants():
        add(f"conservation:{name}", lambda pts, n=name: check_conservation(system, n, pts), tol)
    for name in system.implicit_constants():
        add(f"existence:{name}",
            lambda pts, n=name: check_integrability(system, n, pts), int_tol)
    for rel in system.record.relations:
        add(f"relation:{rel.label()}", lambda pts, r=rel: check_relation(system, r, pts), tol)
    for err in system.record.errata:
        (printed, stored), used = _with_retry(
            lambda pts, e=err: check_erratum(system, e, pts), system, seed, samples)
        ok = _below(stored, tol) and printed > 1e-6
        rep.checks.append(CheckRecord(f"erratum:{err.target}", [float(printed), float(stored)],
                                      tol, ok, used, samples))
    if system.implicit_constants():
        anchor, target, used = path_pair(system, seed + 1)
    for name in system.implicit_constants():
        try:
            d1 = reconstruct_d(system, name, anchor, target, "q1-first")
            d2 = reconstruct_d(system, name, anchor, target, "q2-first")
            res = abs(d1 - d2) / (1 + max(abs(d1), abs(d2)))
        except VerificationError:
            res = float("inf")
        rep.checks.append(CheckRecord(f"path-independence:{name}", float(res), PATH_TOL,
                                      _below(res, PATH_TOL), used, 2))
    triple = system.record.designated()
    everything = system.record.constant_names()
    pts = system_points(system, seed + 2, rank_points)
    ranks = [independence_rank(system, triple, p) for p in pts]
    full = [independence_rank(system, everything, p) for p in pts]
    ok = all(r == 3 for r in ranks) and all(r == 3 for r in full)
    rep.checks.append(CheckRecord("independence:" + ",".join(triple),
                                  sorted(set(ranks)) + ([] if full == ranks else ["all:"] + sorted(set(full))),
                                  3, ok, seed + 2, rank_points))
    return rep


def verify_families(samples: int = 100, seed: int = 1, tol: float = 1e-10) -> VerificationReport:
    rep = VerificationReport("families")
    for fam in family_maps():
        res = fam.identity_residual(fam.sample(seed, samples))
        rep.checks.append(CheckRecord(f"identity:{fam.space}:{fam.label}", float(res), tol,
                                      _below(res, tol), seed, samples))
    return rep


__all__ = [
    "CheckRecord", "VerificationReport", "VerificationError", "GradientField",
    "check_conservation", "d_gradient", "check_integrability", "reconstruct_d",
    "check_relation", "check_erratum", "independence_rank", "check_cartesian_compat",
    "compat_terms", "compat_residual", "path_pair",
    "separation_witness", "generate_table", "golden_table", "catalog_table",
    "MembershipTable", "CoordinateFamilyMap", "family_maps", "family_map", "verify_system",
    "verify_families", "system_points",
]
