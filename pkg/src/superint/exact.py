"""Exact arithmetic over the Gaussian rationals Q(i).

Everything that decides an orbit class goes through this module, so no
floating point is involved in classification.  Real and imaginary parts
are ``gmpy2.mpq`` rationals (arbitrary precision, much faster than
:class:`fractions.Fraction`, which is still accepted on input).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Union

from gmpy2 import mpq

Rational = type(mpq())
_RATIONALS = (int, Fraction, Rational)
Number = Union[int, Fraction, Rational, "GaussC"]


class GaussC:
    """Complex number with Gaussian-rational real and imaginary parts."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        self.re = re if type(re) is Rational else mpq(re)
        self.im = im if type(im) is Rational else mpq(im)
        self._hash = None

    @classmethod
    def coerce(cls, value: Number) -> "GaussC":
        if isinstance(value, GaussC):
            return value
        if isinstance(value, _RATIONALS):
            return cls(value, 0)
        if isinstance(value, str):
            return parse_gauss(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussC exactly")

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def conjugate(self) -> "GaussC":
        return GaussC(self.re, -self.im)

    def norm(self) -> Rational:
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, _RATIONALS):
            return self.im == 0 and self.re == other
        if not isinstance(other, GaussC):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.re, self.im))
        return self._hash

    def __neg__(self):
        return GaussC(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, GaussC):
            return GaussC(self.re + other.re, self.im + other.im)
        if isinstance(other, _RATIONALS):
            return GaussC(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussC):
            return GaussC(self.re - other.re, self.im - other.im)
        if isinstance(other, _RATIONALS):
            return GaussC(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, GaussC):
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussC(a * c - b * d, a * d + b * c)
        if isinstance(other, _RATIONALS):
            return GaussC(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "GaussC":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussC division by zero")
        return GaussC(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, _RATIONALS):
            if other == 0:
                raise ZeroDivisionError("GaussC division by zero")
            return GaussC(self.re / other, self.im / other)
        if isinstance(other, GaussC):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return GaussC.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussC({self})"

    def __str__(self):
        return format_gauss(self)


ZERO = GaussC(0)
ONE = GaussC(1)
I = GaussC(0, 1)


def _fmt_fraction(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_gauss(z: GaussC) -> str:
    """Render in the ``a+bi`` literal form accepted by :func:`parse_gauss`."""
    re_part, im_part = z.re, z.im
    if im_part == 0:
        return _fmt_fraction(re_part)
    if im_part == 1:
        im_txt = "i"
    elif im_part == -1:
        im_txt = "-i"
    else:
        im_txt = _fmt_fraction(im_part) + "i"
    if re_part == 0:
        return im_txt
    sign = "" if im_txt.startswith("-") else "+"
    return f"{_fmt_fraction(re_part)}{sign}{im_txt}"


_TERM = re.compile(r"([+-]?)(\d+(?:\.\d+)?)?(?:/(\d+))?(i?)")


def parse_gauss(text: str) -> GaussC:
    """Parse a literal like ``3``, ``-1/2``, ``2i``, ``1/2+3i``, ``-i/2``.

    Terms may carry a denominator after the ``i`` as well (``i/2``).
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    s = re.sub(r"i/(\d+)", r"/\1i", s)
    pos, total = 0, ZERO
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"malformed complex literal {text!r} at position {pos + 1}")
        sign, num, den, imag = m.groups()
        if num is None and not imag:
            raise ValueError(f"malformed complex literal {text!r} at position {pos + 1}")
        value = mpq(num) if num is not None else mpq(1)
        if den is not None:
            if int(den) == 0:
                raise ValueError(f"zero denominator in {text!r}")
            value /= int(den)
        if sign == "-":
            value = -value
        total = total + (GaussC(0, value) if imag else GaussC(value))
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise ValueError(f"malformed complex literal {text!r} at position {pos + 1}")
    return total


# -- Gaussian integers ------------------------------------------------------
# Elimination runs on (re, im) integer pairs: cheaper than Fractions.

def _gi_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gi_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gi_exact_div(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    num = _gi_mul(a, (b[0], -b[1]))
    qr, rr = divmod(num[0], n)
    qi, ri = divmod(num[1], n)
    if rr or ri:
        raise ArithmeticError("inexact Gaussian-integer division in Bareiss step")
    return (qr, qi)


class ExactMatrix:
    """Dense row-major matrix of :class:`GaussC` entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[Number]):
        self.rows = rows
        self.cols = cols
        self.entries = tuple(GaussC.coerce(e) for e in entries)
        if len(self.entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Number]]) -> "ExactMatrix":
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, [ZERO] * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[GaussC]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows,
                           [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, s: Number) -> "ExactMatrix":
        s = GaussC.coerce(s)
        return ExactMatrix(self.rows, self.cols, [s * e for e in self.entries])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    if r[k]:
                        acc = acc + r[k] * other[k, j]
                out.append(acc)
        return ExactMatrix(self.rows, other.cols, out)

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def is_scalar_multiple_of_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        d = self[0, 0]
        return all(self[i, j] == (d if i == j else ZERO)
                   for i in range(self.rows) for j in range(self.cols))

    def inverse(self) -> "ExactMatrix":
        """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        a = [list(self.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv = a[col][col].inverse()
            a[col] = [inv * e for e in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return ExactMatrix(n, n, [e for row in a for e in row[n:]])

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in self.row(i)) for i in range(self.rows))
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"


def _gaussian_integer_rows(m: ExactMatrix) -> list[list[tuple[int, int]]]:
    rows = []
    for i in range(m.rows):
        r = m.row(i)
        den = 1
        for e in r:
            den = lcm(den, e.re.denominator, e.im.denominator)
        rows.append([(int(e.re * den), int(e.im * den)) for e in r])
    return rows


def exact_rank(m: ExactMatrix) -> int:
    """Rank over Q(i) by fraction-free (Bareiss) elimination.

    Each row is first scaled to Gaussian integers; row scaling preserves
    rank and keeps every Bareiss quotient exact in Z[i].
    """
    a = _gaussian_integer_rows(m)
    nrows, ncols = m.rows, m.cols
    rank, prev = 0, (1, 0)
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if a[r][col] != (0, 0)), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, nrows):
            f = a[r][col]
            row_r, row_p = a[r], a[rank]
            a[r] = [(0, 0) if c <= col else
                    _gi_exact_div(_gi_sub(_gi_mul(p, row_r[c]), _gi_mul(f, row_p[c])), prev)
                    for c in range(ncols)]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


class ExactPoly:
    """Univariate polynomial with GaussC coefficients, ascending degree."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[Number]):
        coeffs = [GaussC.coerce(c) for c in coefficients]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __eq__(self, other):
        return isinstance(other, ExactPoly) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def derivative(self) -> "ExactPoly":
        return ExactPoly([c * k for k, c in enumerate(self.coefficients)][1:])

    def scale(self, s: Number) -> "ExactPoly":
        s = GaussC.coerce(s)
        return ExactPoly([s * c for c in self.coefficients])

    def monic(self) -> "ExactPoly":
        if self.is_zero():
            return self
        return self.scale(self.coefficients[-1].inverse())

    def divmod(self, other: "ExactPoly") -> tuple["ExactPoly", "ExactPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dq = other.degree
        lead_inv = other.coefficients[-1].inverse()
        quot = [ZERO] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] * lead_inv
            quot[k] = c
            if c:
                for j, oc in enumerate(other.coefficients):
                    rem[k + j] = rem[k + j] - c * oc
        return ExactPoly(quot), ExactPoly(rem[:dq] if dq > 0 else [])

    def __call__(self, x: Number) -> GaussC:
        x = GaussC.coerce(x)
        acc = ZERO
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"ExactPoly({[str(c) for c in self.coefficients]})"


def poly_gcd(a: ExactPoly, b: ExactPoly) -> ExactPoly:
    """Monic gcd by the Euclidean algorithm (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def distinct_root_count(p: ExactPoly) -> int:
    """Number of distinct complex roots: deg p - deg gcd(p, p')."""
    if p.is_zero():
        raise ValueError("distinct_root_count of the zero polynomial")
    if p.degree == 0:
        return 0
    return p.degree - poly_gcd(p, p.derivative()).degree


def charpoly(m: ExactMatrix) -> ExactPoly:
    """det(lambda I - m) by Faddeev-LeVerrier; exact over Q(i)."""
    if m.rows != m.cols:
        raise ValueError("charpoly of a non-square matrix")
    n = m.rows
    if n == 3:
        return _charpoly3(m)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    ident = ExactMatrix.identity(n)
    mk = ExactMatrix.zeros(n, n)
    c_prev = ONE
    for k in range(1, n + 1):
        mk = m @ mk + ident.scale(c_prev)
        amk = m @ mk
        trace = ZERO
        for i in range(n):
            trace = trace + amk[i, i]
        c_prev = -trace / k
        coeffs[n - k] = c_prev
    return ExactPoly(coeffs)


def _charpoly3(m: ExactMatrix) -> ExactPoly:
    a, b, c, d, e, f, g, h, k = m.entries
    trace = a + e + k
    minors = (a * e - b * d) + (a * k - c * g) + (e * k - f * h)
    det = a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g)
    return ExactPoly([-det, minors, -trace, ONE])


def cayley_orthogonal(a: ExactMatrix) -> ExactMatrix:
    """Q = (I + a)(I - a)^-1 for antisymmetric a; Q^T Q = I holds exactly."""
    if a.rows != a.cols:
        raise ValueError("Cayley transform needs a square matrix")
    if a.transpose() != a.scale(-1):
        raise ValueError("Cayley transform needs an antisymmetric matrix")
    ident = ExactMatrix.identity(a.rows)
    try:
        inv = (ident - a).inverse()
    except ZeroDivisionError:
        raise ZeroDivisionError("I - a is singular; no Cayley transform") from None
    return (ident + a) @ inv
