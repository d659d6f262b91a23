"""Isometries between ternary lattices and cosets, proper automorphism groups."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .cosets import Coset, Lattice
from .enumeration import representation_counts, short_vectors_with_norms


@dataclass(frozen=True)
class Isometry:
    """Integer matrix sending source-lattice coordinates to target-lattice coordinates."""

    matrix: tuple
    source: Lattice
    target: Lattice

    def __call__(self, x) -> tuple:
        return la.matvec(self.matrix, x)

    @property
    def ambient_det(self) -> int:
        d = la.det3(self.matrix) * self.target.basis_det / self.source.basis_det
        return 1 if d > 0 else -1

    def is_proper(self) -> bool:
        return self.ambient_det == 1

    def preserves_form(self) -> bool:
        t = self.matrix
        return la.matmul(la.matmul(la.transpose(t), self.target.gram), t) == self.source.gram

    def inverse(self) -> "Isometry":
        return Isometry(la.to_int_matrix(la.inverse3(self.matrix)), self.target, self.source)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        return Isometry(la.matmul(self.matrix, other.matrix), other.source, self.target)

    def ambient_matrix(self) -> tuple:
        return la.matmul(la.matmul(self.target.basis, self.matrix), la.inverse3(self.source.basis))

    def negated(self) -> "Isometry":
        return Isometry(tuple(tuple(-x for x in row) for row in self.matrix), self.source, self.target)


def _vectors_by_norm(L: Lattice, bound: int) -> dict[int, list[tuple]]:
    out: dict[int, list[tuple]] = {}
    for x, q in short_vectors_with_norms(Coset(L, 1, (0, 0, 0)), bound):
        out.setdefault(q, []).append(x)
    return out


def lattice_isometries(L1: Lattice, L2: Lattice, first: bool = False, _cache=None) -> list[tuple]:
    """Integer matrices T with T^t G2 T = G1 (all of them, or at most one if ``first``)."""
    if L1.discriminant != L2.discriminant:
        return []
    u1 = la.lll_reduce(L1.gram)
    g1 = la.gram_of(u1, L1.gram)
    n = [g1[i][i] for i in range(3)]
    if _cache is not None and (id(L2), max(n)) in _cache:
        cand = _cache[(id(L2), max(n))]
    else:
        cand = _vectors_by_norm(L2, max(n))
        if _cache is not None:
            _cache[(id(L2), max(n))] = cand
    c0, c1, c2 = cand.get(n[0], []), cand.get(n[1], []), cand.get(n[2], [])
    u1inv = la.to_int_matrix(la.inverse3(u1))
    B = L2.B
    out = []
    for y0 in c0:
        for y1 in c1:
            if B(y0, y1) != g1[0][1]:
                continue
            for y2 in c2:
                if B(y0, y2) != g1[0][2] or B(y1, y2) != g1[1][2]:
                    continue
                t = la.from_columns((y0, y1, y2))
                if abs(la.det3(t)) != 1:
                    continue
                out.append(la.matmul(t, u1inv))
                if first:
                    return out
    return out


def lattice_automorphisms(L: Lattice) -> list[tuple]:
    return lattice_isometries(L, L)


def _shift_ok(t, nu1, nu2, a) -> bool:
    return all((x - y) % a == 0 for x, y in zip(la.matvec(t, nu1), nu2))


def proper_automorphisms(c: Coset) -> list[Isometry]:
    L = c.lattice
    out = []
    for t in lattice_automorphisms(L):
        if la.det3(t) == 1 and _shift_ok(t, c.nu, c.nu, c.a):
            out.append(Isometry(t, L, L))
    return out


def o_plus(c: Coset) -> int:
    return len(proper_automorphisms(c))


def proper_isometry(c1: Coset, c2: Coset) -> Isometry | None:
    """Some proper isometry carrying c1 onto c2 as point sets, or None."""
    if c1.a != c2.a:
        return None
    L1, L2 = c1.lattice, c2.lattice
    sign = 1 if L2.basis_det / L1.basis_det > 0 else -1
    for t in lattice_isometries(L1, L2):
        if la.det3(t) * sign == 1 and _shift_ok(t, c1.nu, c2.nu, c1.a):
            return Isometry(t, L1, L2)
    return None


@dataclass
class ClassInfo:
    key: tuple
    representative: Coset
    o_plus: int


@dataclass
class ClassIndex:
    """Assigns each coset a key identifying its proper class.

    Lattice classes are kept as a list of representatives; a coset is moved onto
    its representative lattice by a proper isometry and its shift is then
    replaced by the least element of its orbit under O+(representative).
    """

    invariant_bound: int | None = None
    lattices: list = field(default_factory=list)
    _invariants: list = field(default_factory=list)
    _autos: list = field(default_factory=list)
    _vec_cache: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)

    def _invariant(self, L: Lattice) -> tuple:
        if self.invariant_bound is None:
            g = la.gram_of(la.lll_reduce(L.gram), L.gram)
            self.invariant_bound = max(g[i][i] for i in range(3))
        counts = representation_counts(Coset(L, 1, (0, 0, 0)), self.invariant_bound)
        return (L.discriminant, tuple(counts))

    def lattice_index(self, L: Lattice) -> tuple[int, tuple]:
        """Index of the representative of L's class and a proper isometry L -> rep (matrix)."""
        inv = self._invariant(L)
        for i, (rep, rinv) in enumerate(zip(self.lattices, self._invariants)):
            if rinv != inv:
                continue
            found = lattice_isometries(L, rep, first=True, _cache=self._vec_cache)
            if found:
                t = found[0]
                if la.det3(t) * (rep.basis_det / L.basis_det) < 0:
                    t = tuple(tuple(-x for x in row) for row in t)
                return i, t
        rep, _ = L.reduced()
        self.lattices.append(rep)
        self._invariants.append(inv)
        self._autos.append([t for t in lattice_automorphisms(rep) if la.det3(t) == 1])
        i = len(self.lattices) - 1
        t = la.to_int_matrix(la.matmul(la.inverse3(rep.basis), L.basis))
        return i, t

    def locate(self, c: Coset) -> ClassInfo:
        i, t = self.lattice_index(c.lattice)
        a = c.a
        nu = tuple(x % a for x in la.matvec(t, c.nu))
        orbit = []
        stab = 0
        for g in self._autos[i]:
            img = tuple(x % a for x in la.matvec(g, nu))
            orbit.append(img)
            if img == nu:
                stab += 1
        key = (i, min(orbit))
        info = self.classes.get(key)
        if info is None:
            info = ClassInfo(key, Coset(self.lattices[i], a, key[1]), stab)
            self.classes[key] = info
        return info

    def key(self, c: Coset) -> tuple:
        return self.locate(c).key
