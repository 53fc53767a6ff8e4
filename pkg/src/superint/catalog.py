"""The 29 superintegrable systems: potentials, constants, relations, table rows.

Leading parts are stored as six coefficient strings.  Euclidean order-2
constants use the basis ``(p_x^2, p_x p_y, p_y^2, M p_x, M p_y, M^2)``; sphere
ones use ``(C11, C22, C33, C12, C13, C23)`` with ``L = sum_ij C_ij J_i J_j``.
First-order constants carry a triple over ``(p_x, p_y, M)`` or
``(J1, J2, J3)``.  Coefficients may mention parameters (``c^2/4``).

Sphere potentials and scalar parts are written in the ambient variables
``x, y, z, w = x+iy, wbar = x-iy`` and pulled back to the angle chart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .exact import GaussC, format_gauss
from .orbits import QuadE2, QuadS2
from .parse import eval_exact, parse_expression
from .phase import (EUCLIDEAN, SPHERE, Chart, Observable, const, parameters_of,
                    singular_subexpressions, sin, var)

EUCLIDEAN_SPACE = "Euclidean"
SPHERE_SPACE = "Sphere"

E2_ROWS = ("Cartesian", "Light Cone", "Polar", "Semi-Hyperbolic",
           "Hyperbolic", "Parabolic", "Elliptic", "Non-Separating")
S2_ROWS = ("Spherical", "Horospherical", "Elliptic",
           "Degenerate elliptic 1", "Degenerate elliptic 2")

DEFAULTS = {"omega": "1", "alpha": "1/2", "beta": "1/4", "gamma": "1/4", "c": "1"}


class CatalogError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class BindingError(ValueError):
    pass


# -- records ----------------------------------------------------------------

@dataclass(frozen=True)
class Parameter:
    name: str
    default: str


@dataclass(frozen=True)
class ConstantRecord:
    name: str
    order: int
    leading: tuple[str, ...]
    d: str | None = None

    def __post_init__(self):
        want = 6 if self.order == 2 else 3
        if self.order not in (1, 2) or len(self.leading) != want:
            raise ValueError(f"constant {self.name}: order {self.order} needs {want} coefficients")

    @property
    def explicit(self) -> bool:
        """True when the full observable is known (first order, or printed d)."""
        return self.order == 1 or self.d is not None


@dataclass(frozen=True)
class Relation:
    """``bracket``: ``{lhs[0], lhs[1]} = rhs``.  ``functional``: ``lhs = rhs`` (rhs is "0")."""

    kind: str
    lhs: tuple[str, ...] | str
    rhs: str

    def __post_init__(self):
        if self.kind == "bracket":
            if not (isinstance(self.lhs, tuple) and len(self.lhs) == 2):
                raise ValueError("bracket relation needs a pair of constant names")
        elif self.kind != "functional":
            raise ValueError(f"unknown relation kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "bracket":
            return f"{{{self.lhs[0]},{self.lhs[1]}}} = {self.rhs}"
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Erratum:
    """A printed form the numeric oracle contradicts, next to the stored one.

    ``target`` is ``"relation"`` (a functional relation) or ``"<name>.d"``
    (the scalar part of a constant).
    """

    target: str
    printed: str
    stored: str


@dataclass(frozen=True)
class SystemRecord:
    id: str
    space: str
    potential: str
    parameters: tuple[Parameter, ...]
    constants: tuple[ConstantRecord, ...]
    relations: tuple[Relation, ...]
    expected_row: tuple[bool, ...]
    notes: str = ""
    # printed forms that the numeric oracle contradicts; kept for the record
    errata: tuple[Erratum, ...] = ()

    def __post_init__(self):
        want = len(E2_ROWS) if self.space == EUCLIDEAN_SPACE else len(S2_ROWS)
        if len(self.expected_row) != want:
            raise ValueError(f"{self.id}: expected_row needs {want} entries")
        names = self.constant_names()
        if names[0] != "A0":
            raise ValueError(f"{self.id}: A0 must come first")
        for rel in self.relations:
            for n in _relation_names(rel):
                if n not in names:
                    raise ValueError(f"{self.id}: relation mentions unknown constant {n}")

    def constant_names(self) -> list[str]:
        return [c.name for c in self.constants]

    def constant(self, name: str) -> ConstantRecord:
        for c in self.constants:
            if c.name == name:
                return c
        raise CatalogError(f"{self.id} has no constant {name!r}; known: {', '.join(self.constant_names())}")

    def designated(self) -> list[str]:
        """A0 plus the first two further constants: the independent triple."""
        return self.constant_names()[:3]

    @property
    def chart(self) -> Chart:
        return EUCLIDEAN if self.space == EUCLIDEAN_SPACE else SPHERE

    @property
    def row_labels(self) -> tuple[str, ...]:
        return E2_ROWS if self.space == EUCLIDEAN_SPACE else S2_ROWS

    def expected_classes(self) -> list[str]:
        return [lab for lab, on in zip(self.row_labels, self.expected_row) if on]


_CONST_NAMES = ("A0", "A1", "A2", "A3", "X", "At1", "At2")


def _relation_names(rel: Relation) -> set[str]:
    texts = [rel.rhs] + (list(rel.lhs) if rel.kind == "bracket" else [rel.lhs])
    found = set()
    for t in texts:
        e = parse_expression(t, env={})
        found |= {p for p in parameters_of(e) if p in _CONST_NAMES}
    return found


# -- the data ---------------------------------------------------------------

# Euclidean leading parts, basis (px^2, px py, py^2, M px, M py, M^2)
PX2 = ("1", "0", "0", "0", "0", "0")
PXPY = ("0", "1", "0", "0", "0", "0")
M2 = ("0", "0", "0", "0", "0", "1")
MPX = ("0", "0", "0", "1", "0", "0")
MPY = ("0", "0", "0", "0", "1", "0")
PMINUS2 = ("1", "-2*i", "-1", "0", "0", "0")
MPPLUS = ("0", "0", "0", "1", "i", "0")
MPMINUS = ("0", "0", "0", "1", "-i", "0")
# first order, basis (px, py, M)
PX, PY, MM = ("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")
PPLUS, PMINUS = ("1", "i", "0"), ("1", "-i", "0")

# sphere, (C11, C22, C33, C12, C13, C23)
J1SQ = ("1", "0", "0", "0", "0", "0")
J2SQ = ("0", "1", "0", "0", "0", "0")
J3SQ = ("0", "0", "1", "0", "0", "0")
J1J2 = ("0", "0", "0", "1/2", "0", "0")
J1J3 = ("0", "0", "0", "0", "1/2", "0")
J2J3 = ("0", "0", "0", "0", "0", "1/2")
JMINUS2 = ("1", "-1", "0", "-i", "0", "0")
JPLUS2 = ("1", "-1", "0", "i", "0", "0")
J3JMINUS = ("0", "0", "0", "0", "1/2", "-i/2")
JPLUS2_J3SQ = ("1", "-1", "-1", "i", "0", "0")
J1, J3 = ("1", "0", "0"), ("0", "0", "1")
JMINUS = ("1", "-i", "0")

_CASIMIR_E = ("1", "0", "1", "0", "0", "0")
_CASIMIR_S = ("1", "1", "1", "0", "0", "0")


def _q(name, leading, d=None):
    return ConstantRecord(name, 2, tuple(leading), d)


def _x(name, leading):
    return ConstantRecord(name, 1, tuple(leading), None)


def _br(a, b, rhs):
    return Relation("bracket", (a, b), rhs)


def _fn(expr):
    return Relation("functional", expr, "0")


def _row(labels, space):
    rows = E2_ROWS if space == EUCLIDEAN_SPACE else S2_ROWS
    unknown = set(labels) - set(rows)
    if unknown:
        raise ValueError(f"unknown table rows {unknown}")
    return tuple(r in labels for r in rows)


_NONDEG = "non-degenerate (four-parameter family)"
_DEG = "degenerate: admits an extra first-order constant"


def _sys(id_, potential, params, constants, relations=(), row=(), notes="", errata=()):
    space = EUCLIDEAN_SPACE if id_.startswith("E") else SPHERE_SPACE
    a0 = ConstantRecord("A0", 2, _CASIMIR_E if space == EUCLIDEAN_SPACE else _CASIMIR_S, potential)
    return SystemRecord(
        id=id_, space=space, potential=potential,
        parameters=tuple(Parameter(p, DEFAULTS[p]) for p in params),
        constants=(a0,) + tuple(constants), relations=tuple(relations),
        expected_row=_row(row, space), notes=notes, errata=tuple(errata))


_E18_ERRATUM = Erratum("relation", "A2^2+A3^2-X^2*A0-alpha/4", "A2^2+A3^2-X^2*A0-alpha^2/4")
_S6_ERRATUM = Erratum("relation", "A2^2+A3^2+X^4-A0*X^2", "A2^2+A3^2+X^4-A0*X^2-alpha^2/4")
_E15_ERRATUM = Erratum("A2.d", "i/3*alpha*zbar^3", "-i/3*alpha*zbar^3")

_SYSTEMS = [
    _sys("E1", "omega^2*(x^2+y^2)+alpha/x^2+beta/y^2", ("omega", "alpha", "beta"),
         [_q("A1", PX2, "omega^2*x^2+alpha/x^2"),
          _q("A2", M2, "alpha*y^2/x^2+beta*x^2/y^2")],
         row=("Cartesian", "Polar", "Elliptic"), notes=_NONDEG),
    _sys("E2", "omega^2*(4*x^2+y^2)+alpha*x+beta/y^2", ("omega", "alpha", "beta"),
         [_q("A1", PX2), _q("A2", MPY)],
         row=("Cartesian", "Parabolic"), notes=_NONDEG),
    _sys("E3", "omega^2*(x^2+y^2)", ("omega",),
         [_q("A1", PX2, "omega^2*x^2"), _q("A2", PXPY, "omega^2*x*y"), _x("X", MM)],
         [_br("A1", "X", "2*A2"), _br("A2", "X", "A0-2*A1"), _br("A1", "A2", "-2*omega^2*X"),
          _fn("A2^2-A1*(A0-A1)+omega^2*X^2")],
         row=("Cartesian", "Light Cone", "Polar", "Hyperbolic", "Elliptic"), notes=_DEG),
    _sys("E4", "alpha*(x+i*y)", ("alpha",),
         [_q("A1", PX2, "alpha*x"), _q("A2", MPPLUS, "i*alpha/4*(x+i*y)^2"), _x("X", PPLUS)],
         [_br("A1", "X", "-alpha"), _br("A2", "X", "i*X^2"),
          _br("A1", "A2", "-i*X^3+2*i*A1*X-i*A0*X"),
          _fn("A0^2+X^2*(2*A0-4*A1+X^2)+4*i*alpha*A2")],
         row=("Cartesian", "Light Cone", "Semi-Hyperbolic", "Non-Separating"), notes=_DEG),
    _sys("E5", "alpha*x", ("alpha",),
         [_q("A2", MPY, "-alpha/4*y^2"), _q("A3", PXPY, "alpha/2*y"), _x("X", PY)],
         [_br("A2", "X", "A3"), _br("A3", "X", "-alpha/2"), _br("A3", "A2", "2*X^3-A0*X"),
          _fn("A3^2+X^4-A0*X^2+alpha*A2")],
         row=("Cartesian", "Light Cone", "Parabolic"), notes=_DEG),
    _sys("E6", "alpha/x^2", ("alpha",),
         [_q("A2", MPX, "-alpha*y/x^2"), _q("A3", M2, "alpha*y^2/x^2"), _x("X", PY)],
         [_br("A2", "X", "A0-X^2"), _br("A3", "X", "2*A2"), _br("A3", "A2", "-2*X*A3-2*alpha*X"),
          _fn("A2^2-A3*(A0-X^2)+alpha*X^2")],
         row=("Cartesian", "Polar", "Parabolic", "Elliptic"), notes=_DEG),
    _sys("E7", "alpha*zbar/sqrt(zbar^2-c^2)+beta*z/(sqrt(zbar^2-c^2)*(zbar+sqrt(zbar^2-c^2))^2)"
               "+gamma*z*zbar", ("alpha", "beta", "gamma", "c"),
         [_q("A1", PMINUS2), _q("A2", ("c^2", "0", "0", "0", "0", "1"))],
         row=("Light Cone", "Hyperbolic", "Elliptic"), notes=_NONDEG),
    _sys("E8", "alpha*z/zbar^3+beta/zbar^2+gamma*z*zbar", ("alpha", "beta", "gamma"),
         [_q("A1", PMINUS2), _q("A2", M2)],
         row=("Light Cone", "Polar", "Hyperbolic"), notes=_NONDEG),
    _sys("E9", "alpha/sqrt(zbar)+beta*x+gamma*(x+zbar)/sqrt(zbar)", ("alpha", "beta", "gamma"),
         [_q("A1", PMINUS2), _q("A2", MPY)],
         row=("Light Cone", "Parabolic"), notes=_NONDEG),
    _sys("E10", "alpha*zbar+beta*(z-3/2*zbar^2)+gamma*(z*zbar-1/2*zbar^3)", ("alpha", "beta", "gamma"),
         [_q("A1", PMINUS2), _q("A2", ("1", "2*i", "-1", "4*i", "4", "0"))],
         row=("Light Cone", "Semi-Hyperbolic"), notes=_NONDEG),
    _sys("E11", "alpha*z+beta*z/sqrt(zbar)+gamma/sqrt(zbar)", ("alpha", "beta", "gamma"),
         [_q("A1", PMINUS2), _q("A2", MPPLUS)],
         row=("Light Cone", "Semi-Hyperbolic", "Non-Separating"), notes=_NONDEG),
    _sys("E12", "alpha*zbar/sqrt(zbar^2+c^2)", ("alpha", "c"),
         [_q("A2", ("-c^2/4", "-i*c^2/2", "c^2/4", "0", "0", "1"),
             "-alpha*c^2*z/(2*sqrt(zbar^2+c^2))"),
          _q("A3", MPMINUS, "i*alpha*c^2/(2*sqrt(zbar^2+c^2))"), _x("X", PMINUS)],
         [_br("X", "A2", "2*i*A3"), _br("X", "A3", "i*X^2"), _br("A2", "A3", "-2*i*X*A2"),
          _fn("A3^2-X^2*A2-c^2/4*A0^2+alpha^2*c^2/4")],
         row=("Light Cone", "Hyperbolic", "Elliptic", "Non-Separating"), notes=_DEG),
    _sys("E13", "alpha/sqrt(zbar)", ("alpha",),
         [_q("A2", MPPLUS, "i*alpha*z/(2*sqrt(zbar))"), _q("A3", MPMINUS, "i*alpha/2*sqrt(zbar)"),
          _x("X", PMINUS)],
         [_br("X", "A2", "i*A0"), _br("X", "A3", "i*X^2"), _br("A2", "A3", "-2*i*X*A2"),
          _fn("A3*A0-X^2*A2-i/2*alpha^2")],
         row=("Light Cone", "Semi-Hyperbolic", "Parabolic", "Non-Separating"), notes=_DEG),
    _sys("E14", "alpha/zbar^2", ("alpha",),
         [_q("A2", MPMINUS, "-i*alpha/zbar"), _q("A3", M2, "alpha*z/zbar"), _x("X", PMINUS)],
         [_br("X", "A2", "i*X^2"), _br("X", "A3", "2*i*A2"), _br("A2", "A3", "2*i*X*A3"),
          _fn("A2^2-A3*X^2+alpha*A0")],
         row=("Light Cone", "Polar", "Hyperbolic", "Non-Separating"), notes=_DEG),
    _sys("E15", "alpha*zbar^2", ("alpha",),
         [_x("X", PMINUS), _q("A2", MPMINUS, "-i/3*alpha*zbar^3")],
         row=("Light Cone", "Non-Separating"),
         notes="instance h(zbar) = alpha*zbar^2 of V = h(zbar); separates in one family only; "
               "scalar part sign fixed by conservation (printed: +i/3)",
         errata=(_E15_ERRATUM,)),
    _sys("E16", "1/sqrt(x^2+y^2)*(alpha+beta/(x+sqrt(x^2+y^2))+gamma/(x-sqrt(x^2+y^2)))",
         ("alpha", "beta", "gamma"),
         [_q("A1", M2), _q("A2", MPY)],
         row=("Polar", "Parabolic", "Elliptic"), notes=_NONDEG),
    _sys("E17", "alpha/sqrt(z*zbar)+beta/z^2+gamma/(z*sqrt(z*zbar))", ("alpha", "beta", "gamma"),
         [_q("A1", M2), _q("A2", MPPLUS)],
         row=("Polar", "Hyperbolic", "Non-Separating"), notes=_NONDEG),
    _sys("E18", "alpha/sqrt(x^2+y^2)", ("alpha",),
         [_q("A2", MPX, "-alpha/2*y/sqrt(x^2+y^2)"), _q("A3", MPY, "alpha/2*x/sqrt(x^2+y^2)"),
          _x("X", MM)],
         [_br("X", "A2", "-A3"), _br("X", "A3", "A2"), _br("A2", "A3", "X*A0"),
          _fn("A2^2+A3^2-X^2*A0-alpha^2/4")],
         row=("Polar", "Hyperbolic", "Parabolic", "Elliptic", "Non-Separating"),
         notes=_DEG + "; functional relation constant term is -alpha^2/4 (printed: -alpha/4)",
         errata=(_E18_ERRATUM,)),
    _sys("E19", "alpha*zbar/sqrt(zbar^2-4)+beta/sqrt(z*(zbar+2))+gamma/sqrt(z*(zbar-2))",
         ("alpha", "beta", "gamma"),
         [_q("A1", ("1", "2*i", "-1", "0", "0", "1")), _q("A2", MPMINUS)],
         row=("Hyperbolic", "Elliptic", "Non-Separating"), notes=_NONDEG),
    _sys("E20", "1/sqrt(x^2+y^2)*(alpha+beta*sqrt(x+sqrt(x^2+y^2))+gamma*sqrt(x-sqrt(x^2+y^2)))",
         ("alpha", "beta", "gamma"),
         [_q("A1", MPX), _q("A2", MPY)],
         row=("Parabolic", "Non-Separating"),
         notes=_NONDEG + "; separates in more than one parabolic system"),
    _sys("S1", "alpha/wbar^2+beta*z/wbar^3+gamma*(1-4*z^2)/wbar^4", ("alpha", "beta", "gamma"),
         [_q("A1", JMINUS2), _q("A2", J3JMINUS)],
         row=("Horospherical", "Elliptic", "Degenerate elliptic 2"), notes=_NONDEG),
    _sys("S2", "alpha/z^2+beta/wbar^2+gamma*w/wbar^3", ("alpha", "beta", "gamma"),
         [_q("A1", JMINUS2), _q("A2", J3SQ)],
         row=("Spherical", "Horospherical", "Degenerate elliptic 1"), notes=_NONDEG),
    _sys("S3", "alpha/z^2", ("alpha",),
         [_q("At1", J1SQ, "alpha*(1+y^2-x^2)/(2*z^2)"), _q("At2", J1J2, "-alpha*x*y/z^2"),
          _x("X", J3), _q("A2", JPLUS2)],
         [_br("X", "At1", "-2*At2"), _br("X", "At2", "-A0+X^2+2*At1"),
          _br("At1", "At2", "-X*(2*At1+alpha)"),
          _fn("At1*(A0-At1-X^2)-At2^2-alpha/2*(X^2+A0)+alpha^2/4")],
         row=("Spherical", "Horospherical", "Elliptic", "Degenerate elliptic 1"), notes=_DEG),
    _sys("S4", "alpha/wbar^2+beta*z/sqrt(x^2+y^2)+gamma/(wbar*sqrt(x^2+y^2))",
         ("alpha", "beta", "gamma"),
         [_q("A1", J3JMINUS), _q("A2", J3SQ)],
         row=("Spherical", "Degenerate elliptic 1", "Degenerate elliptic 2"), notes=_NONDEG),
    _sys("S5", "alpha/wbar^2", ("alpha",),
         [_q("A1", J3JMINUS, "-alpha*z/wbar"), _q("A2", J3SQ, "alpha*w/wbar"), _x("X", JMINUS)],
         [_br("X", "A1", "i*X^2-i*alpha"), _br("X", "A2", "2*i*A1"), _br("A1", "A2", "2*i*X*A2"),
          _fn("A1^2-A2*X^2+alpha*(A2-A0)")],
         row=S2_ROWS, notes=_DEG),
    _sys("S6", "alpha*z/sqrt(x^2+y^2)", ("alpha",),
         [_q("A2", J1J3, "-alpha/2*x/sqrt(x^2+y^2)"), _q("A3", J2J3, "-alpha/2*y/sqrt(x^2+y^2)"),
          _x("X", J3)],
         [_br("X", "A2", "-A3"), _br("X", "A3", "A2"), _br("A2", "A3", "X*(A0-2*X^2)"),
          _fn("A2^2+A3^2+X^4-A0*X^2-alpha^2/4")],
         row=("Spherical", "Elliptic", "Degenerate elliptic 1", "Degenerate elliptic 2"),
         notes=_DEG + "; functional relation needs the constant term -alpha^2/4 (printed: none)",
         errata=(_S6_ERRATUM,)),
    _sys("S7", "alpha*x/sqrt(y^2+z^2)+beta*y/(z^2*sqrt(y^2+z^2))+gamma/z^2", ("alpha", "beta", "gamma"),
         [_q("A1", JPLUS2_J3SQ), _q("A2", J1SQ)],
         row=("Spherical", "Elliptic", "Degenerate elliptic 1"), notes=_NONDEG),
    _sys("S8", "alpha*x/sqrt(y^2+z^2)+beta*(w-z)/sqrt(w*(z-i*y))+gamma*(w+z)/sqrt(w*(z+i*y))",
         ("alpha", "beta", "gamma"),
         [_q("A1", JPLUS2_J3SQ), _q("A2", J1J3)],
         row=("Elliptic", "Degenerate elliptic 1"), notes=_NONDEG),
    _sys("S9", "alpha/x^2+beta/y^2+gamma/z^2", ("alpha", "beta", "gamma"),
         [_q("A1", J3SQ), _q("A2", J2SQ)],
         row=("Spherical", "Elliptic"), notes=_NONDEG),
]

CATALOG: dict[str, SystemRecord] = {s.id: s for s in _SYSTEMS}
SYSTEM_IDS: tuple[str, ...] = tuple(CATALOG)

# parameter values that make a system degenerate or ill-defined
SINGULAR_VALUES: dict[str, dict[str, tuple[str, str]]] = {
    "E7": {"c": ("0", "c = 0 is the limiting system E8; use E8 instead")},
    "E12": {"c": ("0", "c = 0 leaves a constant potential; all constants collapse")},
}


def get_system(id_: str) -> SystemRecord:
    key = id_.strip().upper()
    if key not in CATALOG:
        raise CatalogError(f"unknown system {id_!r}; valid ids: {', '.join(SYSTEM_IDS)}")
    return CATALOG[key]


def systems(space: str | None = None) -> list[SystemRecord]:
    return [s for s in _SYSTEMS if space is None or s.space == space]


def e15_with(h: str) -> SystemRecord:
    """E15 for a user-supplied h(zbar).

    The scalar part of A2 is an integral of h and is left implicit, so the
    record is checked by the existence test.
    """
    e = parse_expression(h, env={"zbar": parse_env(EUCLIDEAN_SPACE)["zbar"]})
    extra = parameters_of(e) - set(DEFAULTS)
    if extra:
        raise ValueError(f"h may depend only on zbar and the parameters {', '.join(DEFAULTS)}; "
                         f"found {', '.join(sorted(extra))}")
    names = tuple(p for p in DEFAULTS if p in parameters_of(e))
    return _sys("E15", h.replace(" ", ""), names, [_x("X", PMINUS), _q("A2", MPMINUS)],
                row=("Light Cone", "Non-Separating"), notes=f"user h(zbar) = {h}")


def custom_system(potential: str, space: str = EUCLIDEAN_SPACE,
                  constants: Sequence[ConstantRecord] = (),
                  values: Mapping[str, object] | None = None) -> "BoundSystem":
    """An ad hoc bound system outside the catalog (e.g. the free particle).

    Parameters are the names in ``potential`` that are not coordinates;
    ``values`` fixes them exactly (default 1).
    """
    env = parse_env(space)
    names = sorted(parameters_of(parse_expression(potential, env=env)))
    for c in constants:
        if c.d is not None:
            names += sorted(parameters_of(parse_expression(c.d, env=env)) - set(names))
    a0 = ConstantRecord("A0", 2, _CASIMIR_E if space == EUCLIDEAN_SPACE else _CASIMIR_S, potential)
    rec = SystemRecord(id="custom", space=space, potential=potential,
                       parameters=tuple(Parameter(n, "1") for n in names),
                       constants=(a0,) + tuple(constants), relations=(),
                       expected_row=(False,) * len(E2_ROWS if space == EUCLIDEAN_SPACE else S2_ROWS),
                       notes="ad hoc")
    return bind(rec, values, fill_defaults=True)


# -- binding ----------------------------------------------------------------

@dataclass(frozen=True)
class ParamSet:
    """Exact parameter values for one system."""

    values: Mapping[str, GaussC]

    def numeric(self) -> dict[str, complex]:
        return {k: complex(v) for k, v in self.values.items()}

    def __getitem__(self, name):
        return self.values[name]


def _sym_terms(space: str) -> tuple[list[Observable], list[Observable]]:
    if space == EUCLIDEAN_SPACE:
        env = parse_env(space)
        px, py, m = env["px"], env["py"], env["M"]
        return [px * px, px * py, py * py, m * px, m * py, m * m], [px, py, m]
    env = parse_env(space)
    j1, j2, j3 = env["J1"], env["J2"], env["J3"]
    two = const(GaussC(2))
    return [j1 * j1, j2 * j2, j3 * j3, two * j1 * j2, two * j1 * j3, two * j2 * j3], [j1, j2, j3]


_ENV_CACHE: dict[str, dict] = {}


def parse_env(space: str) -> dict[str, Observable]:
    if space not in _ENV_CACHE:
        from . import phase
        _ENV_CACHE[space] = (phase.euclidean_environment() if space == EUCLIDEAN_SPACE
                             else phase.sphere_environment())
    return _ENV_CACHE[space]


@dataclass(frozen=True)
class BoundSystem:
    """A record with every parameter fixed; exposes observables."""

    record: SystemRecord
    params: ParamSet

    @property
    def id(self) -> str:
        return self.record.id

    @property
    def chart(self) -> Chart:
        return self.record.chart

    @property
    def space(self) -> str:
        return self.record.space

    @cached_property
    def numeric_params(self) -> dict[str, complex]:
        return self.params.numeric()

    def parse(self, text: str) -> Observable:
        return parse_expression(text, env=parse_env(self.space))

    @cached_property
    def potential(self) -> Observable:
        return self.parse(self.record.potential)

    @cached_property
    def kinetic(self) -> Observable:
        if self.space == EUCLIDEAN_SPACE:
            return self.parse("px^2+py^2")
        th, pth, pph = var("theta"), var("ptheta"), var("pphi")
        return pth * pth + pph * pph / (sin(th) * sin(th))

    @cached_property
    def hamiltonian(self) -> Observable:
        return self.kinetic + self.potential

    def coefficients(self, c: ConstantRecord) -> list[GaussC]:
        return [eval_exact(parse_expression(s, env={}), self.params.values) for s in c.leading]

    def leading(self, name: str) -> QuadE2 | QuadS2:
        c = self.record.constant(name)
        if c.order != 2:
            raise ValueError(f"{name} is first order")
        coeffs = self.coefficients(c)
        if self.space == EUCLIDEAN_SPACE:
            return QuadE2.from_cartesian(coeffs)
        return QuadS2.from_entries(coeffs)

    def leading_observable(self, name: str) -> Observable:
        """The enveloping-algebra part A' of a constant, as a phase-space observable."""
        c = self.record.constant(name)
        if name == "A0":
            return self.kinetic
        quad, lin = _sym_terms(self.space)
        basis = quad if c.order == 2 else lin
        out = None
        for coeff, term in zip(self.coefficients(c), basis):
            if not coeff:
                continue
            t = term if coeff == 1 else const(coeff) * term
            out = t if out is None else out + t
        return out if out is not None else const(GaussC(0))

    def observable(self, name: str) -> Observable:
        """Full constant A' + d.  Raises if the scalar part is not printed."""
        c = self.record.constant(name)
        if name == "A0":
            return self.hamiltonian
        if not c.explicit:
            raise ValueError(f"{self.id}.{name} has no printed scalar part")
        lead = self.leading_observable(name)
        return lead if c.d is None else lead + self.parse(c.d)

    def explicit_constants(self) -> list[str]:
        return [c.name for c in self.record.constants if c.explicit]

    def implicit_constants(self) -> list[str]:
        return [c.name for c in self.record.constants if not c.explicit]

    def relation_env(self) -> dict[str, Observable]:
        return {n: self.observable(n) for n in self.explicit_constants()}

    def relation_observables(self, rel: Relation) -> tuple:
        """(lhs, rhs) observables.  For brackets lhs is the pair of constants."""
        env = self.relation_env()
        rhs = parse_expression(rel.rhs, env=env)
        if rel.kind == "bracket":
            return (env[rel.lhs[0]], env[rel.lhs[1]]), rhs
        return parse_expression(rel.lhs, env=env), rhs

    def singular_set(self) -> list[Observable]:
        """Divisors and sqrt arguments of V and of every printed scalar part."""
        terms = list(singular_subexpressions(self.potential))
        for c in self.record.constants:
            if c.d is not None and c.name != "A0":
                terms += singular_subexpressions(self.parse(c.d))
        seen, out = set(), []
        for t in terms:
            if t not in seen and t.op not in ("const", "param"):
                seen.add(t)
                out.append(t)
        return out

    def generators(self) -> list:
        """Leading parts spanning the system's quadratic constants (plus X_i X_j)."""
        gens = []
        for c in self.record.constants:
            if c.order == 2 and c.name != "A0":
                gens.append(self.leading(c.name))
        firsts = [c for c in self.record.constants if c.order == 1]
        for i, a in enumerate(firsts):
            for b in firsts[i:]:
                gens.append(_product(self.space, self.coefficients(a), self.coefficients(b)))
        out = []
        for g in gens:
            if g not in out:
                out.append(g)
        return out


def _product(space: str, a: Sequence[GaussC], b: Sequence[GaussC]):
    """Leading part of (a . L)(b . L) for first-order triples."""
    if space == EUCLIDEAN_SPACE:
        # basis (px, py, M) -> (px^2, px py, py^2, M px, M py, M^2)
        return QuadE2.from_cartesian([
            a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1],
            a[0] * b[2] + a[2] * b[0], a[1] * b[2] + a[2] * b[1], a[2] * b[2]])
    half = GaussC(1) / 2
    return QuadS2.from_entries([
        a[0] * b[0], a[1] * b[1], a[2] * b[2],
        (a[0] * b[1] + a[1] * b[0]) * half, (a[0] * b[2] + a[2] * b[0]) * half,
        (a[1] * b[2] + a[2] * b[1]) * half])


def bind(record: SystemRecord | str, values: Mapping[str, object] | None = None,
         fill_defaults: bool = False) -> BoundSystem:
    """Fix the parameters of ``record``.

    With ``values=None`` every parameter takes its default.  Otherwise the
    mapping must name every parameter unless ``fill_defaults`` is set.
    Values are exact (GaussC, int, Fraction or an ``a+bi`` string).
    """
    if isinstance(record, str):
        record = get_system(record)
    sig = {p.name: p.default for p in record.parameters}
    given = dict(values or {})
    unknown = set(given) - set(sig)
    if unknown:
        raise BindingError(f"{record.id} has no parameter(s) {', '.join(sorted(unknown))}; "
                           f"signature: {', '.join(sig)}")
    if values is not None and not fill_defaults:
        missing = [n for n in sig if n not in given]
        if missing:
            raise BindingError(f"{record.id}: missing parameter(s) {', '.join(missing)}")
    exact = {}
    for name, default in sig.items():
        raw = given.get(name, default)
        try:
            exact[name] = GaussC.coerce(raw)
        except (TypeError, ValueError) as err:
            raise BindingError(f"{record.id}: parameter {name} = {raw!r} is not an exact "
                               f"Gaussian rational ({err})") from None
    for name, (bad, why) in SINGULAR_VALUES.get(record.id, {}).items():
        if name in exact and exact[name] == GaussC.coerce(bad):
            raise BindingError(f"{record.id}: singular binding {name} = {bad}: {why}")
    return BoundSystem(record, ParamSet(exact))


# -- serialization ----------------------------------------------------------

def _relation_json(r: Relation) -> dict:
    return {"kind": r.kind, "lhs": list(r.lhs) if r.kind == "bracket" else r.lhs, "rhs": r.rhs}


def record_to_json(s: SystemRecord) -> dict:
    return {
        "id": s.id,
        "space": s.space,
        "potential": s.potential,
        "parameters": [{"name": p.name, "default": p.default} for p in s.parameters],
        "constants": [{"name": c.name, "order": c.order, "leading": list(c.leading), "d": c.d}
                      for c in s.constants],
        "relations": [_relation_json(r) for r in s.relations],
        "expected_row": list(s.expected_row),
        "notes": s.notes,
        "errata": [{"target": e.target, "printed": e.printed, "stored": e.stored} for e in s.errata],
    }


def _relation_from(d: dict) -> Relation:
    lhs = tuple(d["lhs"]) if d["kind"] == "bracket" else d["lhs"]
    return Relation(d["kind"], lhs, d["rhs"])


def record_from_json(d: dict) -> SystemRecord:
    return SystemRecord(
        id=d["id"], space=d["space"], potential=d["potential"],
        parameters=tuple(Parameter(p["name"], p["default"]) for p in d["parameters"]),
        constants=tuple(ConstantRecord(c["name"], c["order"], tuple(c["leading"]), c["d"])
                        for c in d["constants"]),
        relations=tuple(_relation_from(r) for r in d["relations"]),
        expected_row=tuple(bool(b) for b in d["expected_row"]),
        notes=d.get("notes", ""),
        errata=tuple(Erratum(e["target"], e["printed"], e["stored"]) for e in d.get("errata", [])))


def export_catalog(format: str = "json", records: Sequence[SystemRecord] | None = None) -> str:
    if format != "json":
        raise ValueError(f"unsupported export format {format!r}")
    recs = _SYSTEMS if records is None else records
    return json.dumps([record_to_json(s) for s in recs], indent=2, ensure_ascii=False) + "\n"


def load_catalog(text: str) -> list[SystemRecord]:
    return [record_from_json(d) for d in json.loads(text)]


def describe(s: SystemRecord) -> str:
    """Human-readable summary used by ``show``."""
    lines = [f"{s.id} ({s.space})", f"  V = {s.potential}",
             "  parameters: " + (", ".join(f"{p.name}={p.default}" for p in s.parameters) or "none")]
    for c in s.constants:
        if c.name == "A0":
            continue
        coeffs = ", ".join(c.leading)
        tail = f" + d, d = {c.d}" if c.d else (" + d (implicit)" if c.order == 2 else "")
        kind = "order 2" if c.order == 2 else "order 1"
        lines.append(f"  {c.name} [{kind}]: ({coeffs}){tail}")
    for r in s.relations:
        lines.append(f"  {r.kind}: {r.label()}")
    for e in s.errata:
        lines.append(f"  erratum [{e.target}]: printed {e.printed}, stored {e.stored}")
    lines.append("  separates in: " + (", ".join(s.expected_classes()) or "none"))
    if s.notes:
        lines.append(f"  notes: {s.notes}")
    return "\n".join(lines)


__all__ = [
    "custom_system",
    "CATALOG", "SYSTEM_IDS", "SystemRecord", "Erratum", "ConstantRecord", "Relation", "Parameter",
    "ParamSet", "BoundSystem", "get_system", "bind", "systems", "export_catalog",
    "load_catalog", "record_to_json", "record_from_json", "parse_expression", "e15_with",
    "CatalogError", "BindingError", "E2_ROWS", "S2_ROWS", "format_gauss", "describe",
]
