"""Short vectors of shifted ternary lattices and their theta series."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from . import linalg as la
from .cosets import Coset


class QSeries:
    """Truncated q-expansion with exact rational coefficients, valid for 0 <= n <= precision."""

    __slots__ = ("precision", "coeffs")

    def __init__(self, precision: int, coeffs=None):
        if precision < 0:
            raise ValueError("precision must be nonnegative")
        self.precision = int(precision)
        self.coeffs: dict[int, Fraction] = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
            for n, v in items:
                n = int(n)
                if n < 0:
                    raise ValueError("negative index")
                if n <= self.precision and v:
                    self.coeffs[n] = Fraction(v)

    def __getitem__(self, n: int) -> Fraction:
        if n < 0 or n > self.precision:
            raise IndexError(f"index {n} outside precision {self.precision}")
        return self.coeffs.get(n, Fraction(0))

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def as_list(self) -> list[Fraction]:
        return [self[n] for n in range(self.precision + 1)]

    def truncate(self, precision: int) -> "QSeries":
        return QSeries(min(precision, self.precision), self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _combine(self, other, sign):
        prec = min(self.precision, other.precision)
        out = {}
        for n in set(self.coeffs) | set(other.coeffs):
            if n <= prec:
                out[n] = self.coeffs.get(n, 0) + sign * other.coeffs.get(n, 0)
        return QSeries(prec, out)

    def __add__(self, other: "QSeries") -> "QSeries":
        return self._combine(other, 1)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self._combine(other, -1)

    def __neg__(self) -> "QSeries":
        return QSeries(self.precision, {n: -v for n, v in self.coeffs.items()})

    def scale(self, c) -> "QSeries":
        c = Fraction(c)
        return QSeries(self.precision, {n: c * v for n, v in self.coeffs.items()})

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.precision == other.precision and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.precision, tuple(sorted(self.coeffs.items()))))

    def differences(self, other: "QSeries") -> list[int]:
        """Indices (within the common precision) where the coefficients differ."""
        prec = min(self.precision, other.precision)
        keys = set(self.coeffs) | set(other.coeffs)
        return sorted(n for n in keys if n <= prec and self.coeffs.get(n, 0) != other.coeffs.get(n, 0))

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "coeffs": {str(n): _frac_str(self.coeffs[n]) for n in sorted(self.coeffs)},
        }

    @classmethod
    def from_json(cls, data) -> "QSeries":
        return cls(int(data["precision"]), {int(k): Fraction(v) for k, v in data["coeffs"].items()})

    def __repr__(self) -> str:
        head = ", ".join(f"{n}: {self.coeffs[n]}" for n in self.support()[:8])
        return f"QSeries(precision={self.precision}, {{{head}{', ...' if len(self.coeffs) > 8 else ''}}})"


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _first_in_class(lo: int, r: int, a: int) -> int:
    return lo + (r - lo) % a


def _walk(gram, a: int, nu, bound: int):
    """Yield (x1, x2, x3-range start, x3-range stop, linear coef, partial norm).

    For each admissible (x1, x2) with x1 = nu1, x2 = nu2 mod a, the x3 values are
    range(start, stop, a) and Q(x) = g33*x3^2 + 2*lin*x3 + q2.
    """
    (g11, g12, g13), (_, g22, g23), (_, _, g33) = gram
    det = la.det3(gram)
    A = g22 * g33 - g23 * g23
    n1, n2, n3 = nu
    # x1^2 * det <= bound * A
    r1 = isqrt(bound * A // det) + 1
    while r1 * r1 * det > bound * A:
        r1 -= 1
    x1 = _first_in_class(-r1, n1, a)
    c1 = g33 * g12 - g13 * g23
    c0 = g33 * g11 - g13 * g13
    while x1 <= r1:
        rng2 = la.int_range_quadratic(A, c1 * x1, c0 * x1 * x1 - g33 * bound)
        if rng2 is not None:
            x2 = _first_in_class(rng2[0], n2, a)
            while x2 <= rng2[1]:
                lin = g13 * x1 + g23 * x2
                q2 = g11 * x1 * x1 + 2 * g12 * x1 * x2 + g22 * x2 * x2
                rng3 = la.int_range_quadratic(g33, lin, q2 - bound)
                if rng3 is not None:
                    start = _first_in_class(rng3[0], n3, a)
                    if start <= rng3[1]:
                        yield x1, x2, start, rng3[1] + 1, lin, q2
                x2 += a
        x1 += a


def short_vectors(c: Coset, bound: int) -> list[tuple[int, int, int]]:
    """All x in aL + nu (L-coordinates) with Q(x) <= bound, in lexicographic order."""
    if bound < 0:
        return []
    out = []
    for x1, x2, start, stop, _, _ in _walk(c.gram, c.a, c.nu, bound):
        for x3 in range(start, stop, c.a):
            out.append((x1, x2, x3))
    return out


def short_vectors_with_norms(c: Coset, bound: int) -> list[tuple[tuple[int, int, int], int]]:
    if bound < 0:
        return []
    g33 = c.gram[2][2]
    out = []
    for x1, x2, start, stop, lin, q2 in _walk(c.gram, c.a, c.nu, bound):
        for x3 in range(start, stop, c.a):
            out.append(((x1, x2, x3), g33 * x3 * x3 + 2 * lin * x3 + q2))
    return out


def representation_counts(c: Coset, bound: int, gram=None, a=None, nu=None) -> list[int]:
    """r(n, aL+nu) for 0 <= n <= bound as a list of ints."""
    gram = c.gram if gram is None else gram
    a = c.a if a is None else a
    nu = c.nu if nu is None else nu
    counts = [0] * (bound + 1)
    if bound < 0:
        return counts
    g33 = gram[2][2]
    step_sq = g33 * a * a
    for _, _, start, stop, lin, q2 in _walk(gram, a, nu, bound):
        # quadratic in x3 along an arithmetic progression: use second differences
        q = g33 * start * start + 2 * lin * start + q2
        d = g33 * (2 * start * a + a * a) + 2 * lin * a
        for _ in range(start, stop, a):
            counts[q] += 1
            q += d
            d += 2 * step_sq
    return counts


def theta_series(c: Coset, precision: int | None = None) -> QSeries:
    if precision is None:
        precision = default_precision(c)
    return QSeries(precision, dict(enumerate(representation_counts(c, precision))))


def default_precision(c: Coset) -> int:
    """ceil(M * prod_{p | M} (1 + 1/p) / 8) with M = 4 N_L a^2."""
    M = c.theta_level
    x = Fraction(M)
    for p in la.prime_factors(M):
        x *= Fraction(p + 1, p)
    x /= 8
    return -((-x.numerator) // x.denominator)


def estimated_points(c: Coset, bound: int) -> float:
    """Rough volume estimate of #{x in aL+nu : Q(x) <= bound}."""
    from math import pi, sqrt

    return 4 / 3 * pi * bound**1.5 / (sqrt(c.lattice.discriminant) * c.a**3)
