"""Second-order elements of the enveloping algebras of e(2,C) and so(3,C).

Euclidean elements live in the null basis
``(p+^2, p-^2, p+p-, M p+, M p-, M^2)`` with ``p± = p_x ± i p_y``; the
Casimir ``p+p- = p_x^2 + p_y^2`` is a basis vector and rotations act
diagonally, so the normal-form reduction is a sequence of coefficient tests.

Sphere elements are symmetric 3x3 matrices ``C`` with ``L = sum C_ij J_i J_j``
and are classified by two group invariants: the number of distinct
eigenvalues of ``C`` and ``dim ker(X -> {X, L})``.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exact import (I, ONE, ZERO, ExactMatrix, GaussC, charpoly,
                    distinct_root_count, exact_rank)


class OrbitClassE2(enum.Enum):
    Cartesian = "Cartesian"
    LightCone = "LightCone"
    Polar = "Polar"
    SemiHyperbolic = "SemiHyperbolic"
    Hyperbolic = "Hyperbolic"
    Parabolic = "Parabolic"
    Elliptic = "Elliptic"
    NonSeparating = "NonSeparating"
    Trivial = "Trivial"


class OrbitClassS2(enum.Enum):
    Spherical = "Spherical"
    Horospherical = "Horospherical"
    Elliptic = "Elliptic"
    DegenerateElliptic1 = "DegenerateElliptic1"
    DegenerateElliptic2 = "DegenerateElliptic2"
    Trivial = "Trivial"


# Column order of the separability tables.
E2_COLUMNS = (OrbitClassE2.Cartesian, OrbitClassE2.LightCone, OrbitClassE2.Polar,
              OrbitClassE2.SemiHyperbolic, OrbitClassE2.Hyperbolic, OrbitClassE2.Parabolic,
              OrbitClassE2.Elliptic, OrbitClassE2.NonSeparating)
S2_COLUMNS = (OrbitClassS2.Spherical, OrbitClassS2.Horospherical, OrbitClassS2.Elliptic,
              OrbitClassS2.DegenerateElliptic1, OrbitClassS2.DegenerateElliptic2)


class ClassificationError(RuntimeError):
    """Invariants fell outside the known table: an internal inconsistency."""


def _g(v) -> GaussC:
    return GaussC.coerce(v)


_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class QuadE2:
    """Coefficients over ``(p+^2, p-^2, p+p-, M p+, M p-, M^2)``."""

    pp2: GaussC = ZERO
    pm2: GaussC = ZERO
    ppm: GaussC = ZERO
    mpp: GaussC = ZERO
    mpm: GaussC = ZERO
    m2: GaussC = ZERO

    FIELDS = ("pp2", "pm2", "ppm", "mpp", "mpm", "m2")

    @classmethod
    def from_null(cls, coeffs: Sequence) -> "QuadE2":
        return cls(*(_g(c) for c in coeffs))

    @classmethod
    def from_cartesian(cls, coeffs: Sequence) -> "QuadE2":
        """From ``(p_x^2, p_x p_y, p_y^2, M p_x, M p_y, M^2)`` coefficients."""
        a, b, c, d, e, f = (_g(x) for x in coeffs)
        # p_x = (p+ + p-)/2, p_y = (p+ - p-)/(2i)
        quarter = Fraction(1, 4)
        b_over_i = b * (-I)
        e_over_i = e * (-I)
        return cls(
            pp2=(a + b_over_i - c) * quarter,
            pm2=(a - b_over_i - c) * quarter,
            ppm=(a + c) * _HALF,
            mpp=(d + e_over_i) * _HALF,
            mpm=(d - e_over_i) * _HALF,
            m2=f,
        )

    def null(self) -> tuple[GaussC, ...]:
        return (self.pp2, self.pm2, self.ppm, self.mpp, self.mpm, self.m2)

    def cartesian(self) -> tuple[GaussC, ...]:
        """Inverse of :meth:`from_cartesian`."""
        p, m, c = self.pp2, self.pm2, self.ppm
        # p+^2 = px^2 + 2i px py - py^2, p-^2 = px^2 - 2i px py - py^2, p+p- = px^2 + py^2
        return (p + m + c, (p - m) * 2 * I, -p - m + c,
                self.mpp + self.mpm, (self.mpp - self.mpm) * I, self.m2)

    def __add__(self, other: "QuadE2") -> "QuadE2":
        return QuadE2(*(a + b for a, b in zip(self.null(), other.null())))

    def scale(self, s) -> "QuadE2":
        s = _g(s)
        return QuadE2(*(s * a for a in self.null()))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.null())


CASIMIR_E2 = QuadE2(ppm=ONE)


def combine(coeffs: Sequence, gens: Sequence):
    """sum c_i * gen_i for QuadE2 or QuadS2 generators."""
    out = None
    for c, g in zip(coeffs, gens):
        if not c:
            continue
        term = g.scale(c)
        out = term if out is None else out + term
    if out is None:
        return gens[0].scale(0)
    return out


# -- group action on e(2,C) -------------------------------------------------

@dataclass(frozen=True)
class Translation:
    """M -> M + a p_x + b p_y."""
    a: GaussC
    b: GaussC


@dataclass(frozen=True)
class Rotation:
    """p+ -> lam p+, p- -> p-/lam (lam != 0)."""
    lam: GaussC


@dataclass(frozen=True)
class Reflection:
    """y -> -y: M -> -M, p+ <-> p-."""


@dataclass(frozen=True)
class CasimirShift:
    """L -> L + kappa (p_x^2 + p_y^2)."""
    kappa: GaussC


@dataclass(frozen=True)
class Scaling:
    """L -> sigma L (sigma != 0)."""
    sigma: GaussC


E2Motion = Union[Translation, Rotation, Reflection, CasimirShift, Scaling]


def _translate_null(L: QuadE2, s: GaussC, t: GaussC) -> QuadE2:
    """M -> M + s p+ + t p-."""
    pp2, pm2, ppm, mpp, mpm, m2 = L.null()
    return QuadE2(
        pp2=pp2 + m2 * s * s + mpp * s,
        pm2=pm2 + m2 * t * t + mpm * t,
        ppm=ppm + m2 * s * t * 2 + mpp * t + mpm * s,
        mpp=mpp + m2 * s * 2,
        mpm=mpm + m2 * t * 2,
        m2=m2,
    )


def act_e2(L: QuadE2, g: E2Motion | Sequence[E2Motion]) -> QuadE2:
    """Apply a motion (or a sequence, left to right) to ``L``."""
    if isinstance(g, (list, tuple)):
        for h in g:
            L = act_e2(L, h)
        return L
    if isinstance(g, Translation):
        a, b = _g(g.a), _g(g.b)
        # a p_x + b p_y = s p+ + t p-
        return _translate_null(L, (a - I * b) * _HALF, (a + I * b) * _HALF)
    if isinstance(g, Rotation):
        lam = _g(g.lam)
        if lam.is_zero():
            raise ValueError("rotation parameter must be nonzero")
        inv = lam.inverse()
        pp2, pm2, ppm, mpp, mpm, m2 = L.null()
        return QuadE2(pp2 * lam * lam, pm2 * inv * inv, ppm, mpp * lam, mpm * inv, m2)
    if isinstance(g, Reflection):
        pp2, pm2, ppm, mpp, mpm, m2 = L.null()
        return QuadE2(pm2, pp2, ppm, -mpm, -mpp, m2)
    if isinstance(g, CasimirShift):
        return L + CASIMIR_E2.scale(g.kappa)
    if isinstance(g, Scaling):
        if _g(g.sigma).is_zero():
            raise ValueError("scaling factor must be nonzero")
        return L.scale(g.sigma)
    raise TypeError(f"not an e(2,C) motion: {g!r}")


def classify_e2(L: QuadE2) -> OrbitClassE2:
    """Normal-form reduction under E(2,C), reflections, Casimir shifts, scaling."""
    L = QuadE2(L.pp2, L.pm2, ZERO, L.mpp, L.mpm, L.m2)
    if L.m2:
        m = L.m2
        L = _translate_null(L, -L.mpp / (m * 2), -L.mpm / (m * 2))
        zero_p, zero_m = L.pp2.is_zero(), L.pm2.is_zero()
        if zero_p and zero_m:
            return OrbitClassE2.Polar
        if zero_p or zero_m:
            return OrbitClassE2.Hyperbolic
        return OrbitClassE2.Elliptic
    if L.mpp and L.mpm:
        return OrbitClassE2.Parabolic
    if L.mpp or L.mpm:
        if not L.mpp:
            L = act_e2(L, Reflection())
        L = _translate_null(L, -L.pp2 / L.mpp, ZERO)
        return OrbitClassE2.SemiHyperbolic if L.pm2 else OrbitClassE2.NonSeparating
    n = (not L.pp2.is_zero()) + (not L.pm2.is_zero())
    return (OrbitClassE2.Trivial, OrbitClassE2.LightCone, OrbitClassE2.Cartesian)[n]


# -- so(3,C) ----------------------------------------------------------------

# Package convention gives {J_i, J_j} = -eps_ijk J_k (checked numerically in
# the test suite against the chart observables).
STRUCTURE_SIGN = -1

_SYM_INDEX = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]


def _eps(i: int, j: int, k: int) -> int:
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


@dataclass(frozen=True)
class QuadS2:
    """Symmetric matrix C with L = sum_ij C_ij J_i J_j."""

    c: ExactMatrix

    def __post_init__(self):
        if (self.c.rows, self.c.cols) != (3, 3) or self.c.transpose() != self.c:
            raise ValueError("QuadS2 needs a symmetric 3x3 matrix")

    @classmethod
    def from_entries(cls, entries: Sequence) -> "QuadS2":
        """From ``(C11, C22, C33, C12, C13, C23)``."""
        c11, c22, c33, c12, c13, c23 = (_g(e) for e in entries)
        return cls(ExactMatrix.from_rows([[c11, c12, c13], [c12, c22, c23], [c13, c23, c33]]))

    def entries(self) -> tuple[GaussC, ...]:
        return tuple(self.c[i, j] for i, j in _SYM_INDEX)

    def __add__(self, other: "QuadS2") -> "QuadS2":
        return QuadS2(self.c + other.c)

    def scale(self, s) -> "QuadS2":
        return QuadS2(self.c.scale(s))

    def conjugate_by(self, q: ExactMatrix) -> "QuadS2":
        """C -> Q^T C Q."""
        return QuadS2(q.transpose() @ self.c @ q)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.c.entries)


CASIMIR_S2 = QuadS2(ExactMatrix.identity(3))


def phi_matrix(L: QuadS2) -> ExactMatrix:
    """6x3 matrix of X -> {X, L} from span(J1, J2, J3) to quadratic elements.

    Rows follow (J1^2, J2^2, J3^2, J1J2, J1J3, J2J3).
    """
    c = L.c
    cols = []
    for a in range(3):
        # {J_a, J_i J_j} = s eps_aik J_k J_j + s eps_ajk J_i J_k
        quad = {}
        for i in range(3):
            for j in range(3):
                cij = c[i, j]
                if not cij:
                    continue
                for k in range(3):
                    e1 = _eps(a, i, k)
                    if e1:
                        key = tuple(sorted((k, j)))
                        quad[key] = quad.get(key, ZERO) + cij * (STRUCTURE_SIGN * e1)
                    e2 = _eps(a, j, k)
                    if e2:
                        key = tuple(sorted((i, k)))
                        quad[key] = quad.get(key, ZERO) + cij * (STRUCTURE_SIGN * e2)
        cols.append([quad.get(idx, ZERO) for idx in _SYM_INDEX])
    return ExactMatrix(6, 3, [cols[a][r] for r in range(6) for a in range(3)])


def s2_invariants(L: QuadS2) -> tuple[int, int]:
    """(number of distinct eigenvalues of C, dim ker phi)."""
    return distinct_root_count(charpoly(L.c)), 3 - exact_rank(phi_matrix(L))


_S2_TABLE = {
    (2, 1): OrbitClassS2.Spherical,
    (1, 1): OrbitClassS2.Horospherical,
    (3, 0): OrbitClassS2.Elliptic,
    (2, 0): OrbitClassS2.DegenerateElliptic1,
    (1, 0): OrbitClassS2.DegenerateElliptic2,
}


def classify_s2(L: QuadS2) -> OrbitClassS2:
    if L.c.is_scalar_multiple_of_identity():
        return OrbitClassS2.Trivial
    inv = s2_invariants(L)
    try:
        return _S2_TABLE[inv]
    except KeyError:
        raise ClassificationError(f"invariant pair {inv} is not in the sphere table") from None


def classify(L):
    if isinstance(L, QuadE2):
        return classify_e2(L)
    if isinstance(L, QuadS2):
        return classify_s2(L)
    raise TypeError(f"cannot classify {type(L).__name__}")


# -- combination lattice ----------------------------------------------------

LATTICE = tuple(GaussC.coerce(s) for s in (
    "0", "1", "-1", "2", "-2", "1/2", "-1/2",
    "i", "-i", "2i", "-2i", "i/2", "-i/2",
    "1+i", "1-i", "-1+i", "-1-i"))

N_RANDOM = 1000
RANDOM_BOUND = 7


def random_gauss(rng: random.Random, bound: int = RANDOM_BOUND) -> GaussC:
    def q():
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    return GaussC(q(), q())


def separability_classes(generators: Sequence, seed: int = 0,
                         n_random: int = N_RANDOM) -> set:
    """Classes reached by linear combinations of the generators (Trivial dropped).

    Every combination with coefficients in :data:`LATTICE` is classified,
    plus ``n_random`` seeded random Gaussian-rational combinations.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("separability_classes needs at least one generator")
    kinds = {type(g) for g in gens}
    if len(kinds) != 1:
        raise ValueError("generators must all be QuadE2 or all QuadS2")
    found = set()
    seen = set()
    for coeffs in itertools.product(LATTICE, repeat=len(gens)):
        key = _projective_key(coeffs)
        if key in seen:
            continue
        seen.add(key)
        found.add(classify(combine(coeffs, gens)))
    rng = random.Random(seed)
    for _ in range(n_random):
        coeffs = [random_gauss(rng) for _ in gens]
        found.add(classify(combine(coeffs, gens)))
    found.discard(OrbitClassE2.Trivial)
    found.discard(OrbitClassS2.Trivial)
    return found


def _projective_key(coeffs: Sequence[GaussC]) -> tuple:
    # classes are scale invariant: combinations differing by a factor coincide
    lead = next((c for c in coeffs if c), None)
    if lead is None:
        return ()
    inv = lead.inverse()
    return tuple(c * inv for c in coeffs)


def parse_coefficients(text: str, count: int = 6) -> list[GaussC]:
    """Comma-separated exact complex values, e.g. ``0,0,0,1,0,1/2+i``."""
    from .exact import parse_gauss
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ValueError(f"expected {count} comma-separated coefficients, got {len(parts)}")
    return [parse_gauss(p) for p in parts]


def representatives_e2(c2: GaussC | int = 4) -> dict[OrbitClassE2, QuadE2]:
    """One representative per class as listed for the Euclidean plane."""
    pp = QuadE2(pp2=ONE)
    pm = QuadE2(pm2=ONE)
    px2 = QuadE2.from_cartesian([1, 0, 0, 0, 0, 0])
    m2 = QuadE2(m2=ONE)
    return {
        OrbitClassE2.Cartesian: px2,
        OrbitClassE2.LightCone: pp,
        OrbitClassE2.Polar: m2,
        OrbitClassE2.SemiHyperbolic: QuadE2(mpp=ONE) + pm,
        OrbitClassE2.Hyperbolic: m2 + pp,
        OrbitClassE2.Parabolic: QuadE2.from_cartesian([0, 0, 0, 1, 0, 0]),
        OrbitClassE2.Elliptic: m2 + px2.scale(c2),
        OrbitClassE2.NonSeparating: QuadE2(mpp=ONE),
    }


def representatives_s2(r: GaussC | Fraction | int = Fraction(1, 2)) -> dict[OrbitClassS2, QuadS2]:
    """One representative per sphere class (elliptic with modulus r)."""
    jm2 = QuadS2.from_entries([1, -1, 0, -I, 0, 0])        # (J1 - iJ2)^2
    j3jm = QuadS2.from_entries([0, 0, 0, 0, _HALF, -I * _HALF])  # J3 (J1 - iJ2)
    jp2_minus_j3 = QuadS2.from_entries([1, -1, -1, I, 0, 0])  # (J1 + iJ2)^2 - J3^2
    return {
        OrbitClassS2.Horospherical: jm2,
        OrbitClassS2.DegenerateElliptic2: j3jm,
        OrbitClassS2.DegenerateElliptic1: jp2_minus_j3,
        OrbitClassS2.Spherical: QuadS2.from_entries([0, 0, 1, 0, 0, 0]),
        OrbitClassS2.Elliptic: QuadS2.from_entries([1, r, 0, 0, 0, 0]),
    }
