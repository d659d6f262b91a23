"""Ternary lattices and lattice cosets aL + nu."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

from . import linalg as la


class ConductorMismatch(ValueError):
    """Raised when gcd(a, nu) > 1, so the set aL + nu has a smaller conductor.

    ``refactored`` is the same point set written as a'L' + nu' with conductor a'.
    """

    def __init__(self, conductor: int, refactored: "Coset"):
        self.conductor = conductor
        self.refactored = refactored
        super().__init__(
            f"conductor of the shift is {conductor}, not the modulus; "
            f"use {json.dumps(refactored.to_json())}"
        )


class SchemaError(ValueError):
    pass


def _is_positive_definite(g) -> bool:
    return g[0][0] > 0 and g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0 and la.det3(g) > 0


@dataclass(frozen=True)
class AmbientSpace:
    gram0: tuple

    def __post_init__(self):
        g = la.to_int_matrix(self.gram0)
        if la.transpose(g) != g:
            raise ValueError("Gram matrix must be symmetric")
        if not _is_positive_definite(g):
            raise ValueError("Gram matrix must be positive definite")
        object.__setattr__(self, "gram0", g)


@dataclass(frozen=True)
class Lattice:
    """A full-rank lattice in an ambient space, basis given column-wise."""

    ambient: AmbientSpace
    basis: tuple

    def __post_init__(self):
        b = la.to_fraction_matrix(self.basis)
        if la.det3(b) == 0:
            raise la.SingularMatrixError("lattice basis is singular")
        object.__setattr__(self, "basis", b)
        g = la.gram_of(b, self.ambient.gram0)
        if not la.is_integral(g):
            raise ValueError("lattice is not integral")

    @classmethod
    def from_gram(cls, gram) -> "Lattice":
        return cls(AmbientSpace(la.mat(gram)), la.identity())

    @cached_property
    def gram(self) -> tuple:
        return la.to_int_matrix(la.gram_of(self.basis, self.ambient.gram0))

    @cached_property
    def discriminant(self) -> int:
        return la.det3(self.gram)

    @cached_property
    def level(self) -> int:
        return la.common_denominator(la.inverse3(self.gram))

    @cached_property
    def basis_det(self) -> Fraction:
        return Fraction(la.det3(self.basis))

    def Q(self, x) -> int:
        g = self.gram
        return sum(g[i][j] * x[i] * x[j] for i in range(3) for j in range(3))

    def B(self, x, y) -> int:
        g = self.gram
        return sum(g[i][j] * x[i] * y[j] for i in range(3) for j in range(3))

    def to_ambient(self, x) -> tuple:
        return la.matvec(self.basis, x)

    def coordinates(self, v) -> tuple:
        """L-coordinates of an ambient vector (rational if v is not in L)."""
        return tuple(la._norm(Fraction(t)) for t in la.matvec(la.inverse3(self.basis), v))

    def contains(self, v) -> bool:
        return all(Fraction(t).denominator == 1 for t in self.coordinates(v))

    def with_basis_change(self, u) -> "Lattice":
        """Same lattice, new basis given by the columns of the unimodular u."""
        return Lattice(self.ambient, la.matmul(self.basis, u))

    def reduced(self) -> tuple["Lattice", tuple]:
        """LLL-reduced copy and the transform (new basis in old coordinates)."""
        u = la.lll_reduce(self.gram)
        return self.with_basis_change(u), u


def discriminant(L: Lattice) -> int:
    return L.discriminant


def level(L: Lattice) -> int:
    return L.level


@dataclass(frozen=True)
class Coset:
    lattice: Lattice
    a: int
    nu: tuple

    def __post_init__(self):
        if self.a < 1:
            raise ValueError("modulus must be positive")
        nu = tuple(int(t) % self.a for t in self.nu)
        if len(nu) != 3:
            raise ValueError("shift must have three coordinates")
        object.__setattr__(self, "nu", nu)
        if self.conductor_gcd != 1:
            raise ValueError("conductor is smaller than the modulus; use make_coset")

    @property
    def conductor_gcd(self) -> int:
        return gcd(self.a, *self.nu)

    @property
    def gram(self) -> tuple:
        return self.lattice.gram

    @property
    def theta_level(self) -> int:
        """M = 4 N_L a^2."""
        return 4 * self.lattice.level * self.a * self.a

    def is_good_prime(self, p: int) -> bool:
        return la.is_prime(p) and self.theta_level % p != 0

    def Q(self, x) -> int:
        return self.lattice.Q(x)

    def contains(self, x) -> bool:
        """Whether the L-coordinate vector x lies in aL + nu."""
        return all((xi - ni) % self.a == 0 for xi, ni in zip(x, self.nu))

    def contains_ambient(self, v) -> bool:
        x = self.lattice.coordinates(v)
        if any(Fraction(t).denominator != 1 for t in x):
            return False
        return self.contains(x)

    def with_lattice_basis(self, u) -> "Coset":
        """Rewrite the coset over a new basis of the same lattice (columns of unimodular u)."""
        nu = la.matvec(la.inverse3(u), self.nu)
        return Coset(self.lattice.with_basis_change(u), self.a, tuple(int(t) for t in nu))

    def reduced(self) -> "Coset":
        L, u = self.lattice.reduced()
        nu = la.matvec(la.inverse3(u), self.nu)
        return Coset(L, self.a, tuple(int(t) for t in nu))

    def sample(self, rng, radius: int = 3) -> tuple:
        return tuple(n + self.a * rng.randint(-radius, radius) for n in self.nu)

    @cached_property
    def key(self) -> bytes:
        return canonical_key(self)

    def to_json(self) -> dict:
        """Coset JSON: Gram matrix of L in its basis, modulus and shift.

        If the basis is negatively oriented in the ambient space the basis is
        negated first, so that reading the JSON back (with its own basis as the
        ambient basis) keeps orientation and hence the proper class.
        """
        nu = self.nu
        if self.lattice.basis_det < 0:
            nu = tuple((-x) % self.a for x in nu)
        return {
            "gram": [[_jint(x) for x in row] for row in self.gram],
            "a": _jint(self.a),
            "nu": [_jint(x) for x in nu],
        }

    def __repr__(self) -> str:
        return f"Coset(gram={self.gram}, a={self.a}, nu={self.nu})"


def make_coset(L: Lattice, a: int, nu) -> Coset:
    a = int(a)
    if a < 1:
        raise ValueError("modulus must be positive")
    nu = tuple(int(t) % a for t in nu)
    g = gcd(a, *nu)
    if g != 1:
        a2 = a // g
        L2 = Lattice(L.ambient, tuple(tuple(g * x for x in row) for row in L.basis))
        raise ConductorMismatch(a2, Coset(L2, a2, tuple(t // g for t in nu)))
    return Coset(L, a, nu)


def scale_shift(c: Coset, s: int) -> Coset:
    """The coset aL + s*nu."""
    if gcd(s, c.a) != 1:
        raise ValueError(f"scaling factor {s} is not coprime to {c.a}")
    return Coset(c.lattice, c.a, tuple(s * t for t in c.nu))


def canonical_key(c: Coset) -> bytes:
    """Deterministic serialization of the point set aL + nu in ambient coordinates."""
    basis = c.lattice.basis
    d = la.common_denominator(basis)
    mod_basis = [[int(d * c.a * x) for x in row] for row in basis]
    h = la.hnf(la.mat(mod_basis))
    v = [int(d * x) for x in la.matvec(basis, c.nu)]
    for i in range(2, -1, -1):
        q = v[i] // h[i][i]
        if q:
            v = [v[r] - q * h[r][i] for r in range(3)]
    parts = [str(d)] + [str(x) for row in h for x in row] + [str(x) for x in v]
    return ",".join(parts).encode()


def _jint(x: int):
    x = int(x)
    return x if -(2**63) <= x < 2**63 else str(x)


def _parse_int(x) -> int:
    if isinstance(x, bool):
        raise SchemaError("booleans are not integers")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            raise SchemaError(f"not an integer: {x!r}") from None
    raise SchemaError(f"not an integer: {x!r}")


def coset_from_json(data) -> Coset:
    """Parse ``{"gram": [[...]*3]*3, "a": int, "nu": [int]*3}``.

    Schema problems raise SchemaError; conductor problems raise ConductorMismatch.
    """
    if not isinstance(data, dict):
        raise SchemaError("coset must be a JSON object")
    missing = {"gram", "a", "nu"} - set(data)
    if missing:
        raise SchemaError(f"missing fields: {sorted(missing)}")
    gram = data["gram"]
    if not (isinstance(gram, list) and len(gram) == 3 and all(isinstance(r, list) and len(r) == 3 for r in gram)):
        raise SchemaError("gram must be a 3x3 array")
    g = tuple(tuple(_parse_int(x) for x in row) for row in gram)
    nu = data["nu"]
    if not (isinstance(nu, list) and len(nu) == 3):
        raise SchemaError("nu must have three entries")
    nu = tuple(_parse_int(x) for x in nu)
    a = _parse_int(data["a"])
    if a < 1:
        raise SchemaError("a must be positive")
    try:
        L = Lattice.from_gram(g)
    except ValueError as e:
        raise SchemaError(str(e)) from None
    return make_coset(L, a, nu)


def coset_to_json(c: Coset) -> dict:
    return c.to_json()


def lattice_from_gram(gram) -> Lattice:
    return Lattice.from_gram(gram)


def coset(gram, a: int, nu) -> Coset:
    """Shortcut: coset over the lattice with the given Gram matrix (ambient = its basis)."""
    return make_coset(Lattice.from_gram(gram), a, nu)
