"""p-neighbors of lattice cosets and enumeration of proper classes.

For a prime p not dividing M = 4 N_L a^2 the p-neighbors of aL + nu are the
cosets aK + mu where K runs over the Kneser p-neighbors of L and mu is the
element of K meet L congruent to p^{-1} nu modulo aL.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .cosets import Coset, Lattice, scale_shift
from .isometry import ClassIndex, proper_isometry


class InvalidPrime(ValueError):
    pass


class NotInZp(ValueError):
    pass


def check_prime(c: Coset, p: int) -> None:
    if not la.is_prime(p):
        raise InvalidPrime(f"{p} is not prime")
    if c.theta_level % p == 0:
        raise InvalidPrime(f"{p} divides 4*N_L*a^2 = {c.theta_level}")


def isotropic_lines(gram, p: int) -> list[tuple[int, int, int]]:
    """Projective points mod p on which Q vanishes, normalized (first nonzero entry 1)."""
    g = gram
    out = []

    def q(v):
        return sum(g[i][j] * v[i] * v[j] for i in range(3) for j in range(3)) % p

    for x in range(p):
        for y in range(p):
            v = (1, x, y)
            if q(v) == 0:
                out.append(v)
    for y in range(p):
        v = (0, 1, y)
        if q(v) == 0:
            out.append(v)
    if q((0, 0, 1)) == 0:
        out.append((0, 0, 1))
    return out


def hensel_lift(gram, v, p: int) -> tuple:
    """v + p*t*e_j with Q(v') = 0 mod p^2, for an isotropic v mod p."""
    w = la.matvec(gram, v)
    j = next(i for i in range(3) if w[i] % p)
    qv = sum(v[i] * w[i] for i in range(3))
    assert qv % p == 0
    t = (-(qv // p) * la.mod_inverse(2 * w[j], p)) % p
    out = list(v)
    out[j] += p * t
    return tuple(out)


def orthogonal_mod_p(gram, v, p: int) -> list[tuple]:
    """Generators of {z in Z^3 : B(v, z) = 0 mod p}."""
    w = [x % p for x in la.matvec(gram, v)]
    j = next(i for i in range(3) if w[i])
    winv = la.mod_inverse(w[j], p)
    gens = []
    e = [[1 if r == c else 0 for r in range(3)] for c in range(3)]
    pe = list(e[j])
    pe[j] = p
    gens.append(tuple(pe))
    for i in range(3):
        if i != j:
            z = list(e[i])
            z[j] -= (w[i] * winv) % p
            gens.append(tuple(z))
    return gens


def kneser_neighbor_coords(gram, v, p: int) -> tuple:
    """Basis (in L-coordinates, column-wise, LLL-reduced) of the p-neighbor attached to the line v."""
    vl = hensel_lift(gram, v, p)
    gens = orthogonal_mod_p(gram, v, p) + [tuple(Fraction(x, p) for x in vl)]
    k = la.hnf_columns(gens)
    u = la.lll_reduce(la.to_int_matrix(la.gram_of(k, gram)))
    return la.matmul(k, u)


@dataclass
class NeighborSet:
    p: int
    source: Coset
    members: list
    lines: list = field(default_factory=list)
    coords: list = field(default_factory=list)  # basis of each member in source coordinates

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def neighbors(c: Coset, p: int) -> NeighborSet:
    check_prime(c, p)
    L, a = c.lattice, c.a
    gram = L.gram
    pbar = la.mod_inverse(p, a)
    mu_L = tuple(p * pbar * pbar * x for x in c.nu)  # in pL, congruent to pbar*nu mod aL
    lines = isotropic_lines(gram, p)
    members, coords = [], []
    for v in lines:
        kc = kneser_neighbor_coords(gram, v, p)
        mu = la.to_int_matrix([la.matvec(la.inverse3(kc), mu_L)])[0]
        K = Lattice(L.ambient, la.matmul(L.basis, kc))
        members.append(Coset(K, a, tuple(x % a for x in mu)))
        coords.append(kc)
    return NeighborSet(p, c, members, lines, coords)


def in_pK(x, kc, p: int) -> bool:
    """Whether the source-coordinate vector x lies in pK, K given by its source coordinates."""
    y = la.matvec(la.inverse3(kc), x)
    return all(Fraction(t, p).denominator == 1 for t in y)


def pi_count(x, c: Coset, p: int, nbrs: NeighborSet | None = None) -> int:
    """Number of p-neighbors aK + mu of c with x in pK (direct membership test)."""
    check_prime(c, p)
    if not c.contains(x):
        raise ValueError("x is not in the coset")
    if c.Q(x) % (p * p):
        raise ValueError("Q(x) is not divisible by p^2")
    nbrs = nbrs or neighbors(c, p)
    return sum(1 for kc in nbrs.coords if in_pK(x, kc, p))


def pi_closed_form(x, c: Coset, p: int) -> int:
    n = c.Q(x) // (p * p)
    if any(t % p for t in x):
        return 1
    if any(t % (p * p) for t in x):
        return 1 + la.kronecker(-c.lattice.discriminant * n, p)
    return p + 1


@dataclass
class ClassList:
    kind: str  # "genus" or "spinor-candidate"
    seed: Coset
    representatives: list  # list of (Coset, o_plus)
    primes_used: list
    validated_with: list = field(default_factory=list)
    keys: list = field(default_factory=list)
    linked: list = field(default_factory=list)  # odd-depth classes of the neighbor graph (spinor runs)
    linked_spinor_genera: int | None = None

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, o) for _, o in self.representatives), Fraction(0))

    def __len__(self):
        return len(self.representatives)

    def cosets(self) -> list[Coset]:
        return [r for r, _ in self.representatives]

    def to_json(self) -> dict:
        m = self.mass
        return {
            "kind": self.kind,
            "seed": self.seed.to_json(),
            "representatives": [r.to_json() for r, _ in self.representatives],
            "o_plus": [o for _, o in self.representatives],
            "mass": f"{m.numerator}/{m.denominator}",
            "primes_used": list(self.primes_used),
            "validated_with": list(self.validated_with),
        }


def class_list_from_json(data) -> ClassList:
    from .cosets import coset_from_json

    reps = [coset_from_json(r) for r in data["representatives"]]
    cl = ClassList(
        data["kind"],
        coset_from_json(data["seed"]),
        list(zip(reps, [int(o) for o in data["o_plus"]])),
        [int(p) for p in data["primes_used"]],
        [int(p) for p in data.get("validated_with", [])],
    )
    if Fraction(data["mass"]) != cl.mass:
        raise ValueError("stored mass does not match o_plus values")
    return cl


def _ordered(members, rng):
    if rng is None:
        return list(members)
    members = list(members)
    rng.shuffle(members)
    return members


def enumerate_classes(c: Coset, p: int, index: ClassIndex | None = None, rng: random.Random | None = None) -> ClassList:
    """Proper classes of the spinor genus of c, read off from the p-neighbor graph (p = 1 mod a).

    Breadth-first search over (class, parity of depth). Classes reached at even
    depth form spn+(c); odd depth gives spn+ of the neighbors, which is either the
    same spinor genus (both parities then carry the same classes) or the other
    spinor genus linked to it.
    """
    check_prime(c, p)
    if p % c.a != 1 % c.a:
        raise InvalidPrime(f"{p} is not 1 mod {c.a}")
    index = index or ClassIndex()
    start = index.locate(c)
    seen = {(start.key, 0)}
    queue = deque([(start.key, 0)])
    while queue:
        key, parity = queue.popleft()
        rep = index.classes[key].representative
        for m in _ordered(neighbors(rep, p).members, rng):
            node = (index.locate(m).key, 1 - parity)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    even = sorted(k for k, par in seen if par == 0)
    odd = sorted(k for k, par in seen if par == 1)
    if set(even) == set(odd):
        linked = 1
    elif set(even).isdisjoint(odd):
        linked = 2
    else:
        raise RuntimeError("neighbor graph parity classes overlap partially")
    reps = [(index.classes[k].representative, index.classes[k].o_plus) for k in even]
    return ClassList(
        "spinor-candidate", c, reps, [p], keys=even,
        linked=[(index.classes[k].representative, index.classes[k].o_plus) for k in odd],
        linked_spinor_genera=linked,
    )


def genus_moves(c: Coset, p: int) -> list[Coset]:
    """p-neighbors of c carried back into gen+(c) by nu -> p*nu."""
    members = neighbors(c, p).members
    if p % c.a == 1 % c.a:
        return members
    return [scale_shift(m, p) for m in members]


def enumerate_genus(c: Coset, primes, index: ClassIndex | None = None, rng: random.Random | None = None) -> ClassList:
    """Proper classes of gen+(c) reachable by neighbor moves at the given primes."""
    primes = list(primes)
    if not primes:
        raise InvalidPrime("at least one prime is required")
    for p in primes:
        check_prime(c, p)
    index = index or ClassIndex()
    start = index.locate(c).key
    seen = {start}
    queue = deque([start])
    while queue:
        key = queue.popleft()
        rep = index.classes[key].representative
        for p in primes:
            for m in _ordered(genus_moves(rep, p), rng):
                k = index.locate(m).key
                if k not in seen:
                    seen.add(k)
                    queue.append(k)
    keys = sorted(seen)
    reps = [(index.classes[k].representative, index.classes[k].o_plus) for k in keys]
    return ClassList("genus", c, reps, primes, keys=keys)


def same_classes(cl1: ClassList, cl2: ClassList, index: ClassIndex | None = None) -> bool:
    """Whether two class lists describe the same set of proper classes."""
    if index is not None:
        k1 = {index.locate(r).key for r in cl1.cosets()}
        k2 = {index.locate(r).key for r in cl2.cosets()}
        return k1 == k2
    if len(cl1) != len(cl2):
        return False
    for r1 in cl1.cosets():
        if not any(proper_isometry(r1, r2) for r2 in cl2.cosets()):
            return False
    return True


@dataclass
class ValidationResult:
    agree: bool
    runs: dict  # prime -> ClassList


def validate(c: Coset, primes, index: ClassIndex | None = None) -> ValidationResult:
    index = index or ClassIndex()
    runs = {p: enumerate_classes(c, p, index) for p in primes}
    lists = list(runs.values())
    agree = all(same_classes(lists[0], other, index) and lists[0].mass == other.mass for other in lists[1:])
    return ValidationResult(agree, runs)


def spinor_classes(c: Coset, p: int, validate_primes=(), index: ClassIndex | None = None) -> tuple[ClassList, ValidationResult | None]:
    index = index or ClassIndex()
    cl = enumerate_classes(c, p, index)
    if not validate_primes:
        return cl, None
    res = validate(c, [p] + list(validate_primes), index)
    cl.validated_with = list(validate_primes)
    return cl, res


def zp_distance(c1: Coset, c2: Coset, p: int) -> int:
    """n with L2 inside p^-n L1 minimal, or NotInZp if c2 is not in Z_p(c1)."""
    L1, L2 = c1.lattice, c2.lattice
    if L1.ambient != L2.ambient or c1.a != c2.a:
        raise NotInZp("cosets live in different spaces or have different conductors")
    if L1.discriminant != L2.discriminant:
        raise NotInZp("discriminants differ")
    coords = la.matmul(la.inverse3(L1.basis), L2.basis)
    back = la.matmul(la.inverse3(L2.basis), L1.basis)
    n = 0
    for m in (coords, back):
        d = la.common_denominator(m)
        k = 0
        while d % p == 0:
            d //= p
            k += 1
        if d != 1:
            raise NotInZp("lattices differ away from p")
        n = max(n, k)
    # shifts must agree in aL1 localized away from p
    diff = la.matvec(la.inverse3(L1.basis), [x - y for x, y in zip(L2.to_ambient(c2.nu), L1.to_ambient(c1.nu))])
    d = la.common_denominator([diff])
    scaled = [int(Fraction(x) * d) for x in diff]
    if any(x % c1.a for x in scaled):
        raise NotInZp("shifts differ modulo a away from p")
    return n


def zp_chain(c1: Coset, c2: Coset, p: int) -> list[Coset]:
    """Chain c1 = K_0, ..., K_n = c2 with each K_i a p-neighbor of K_{i-1} (p = 1 mod a)."""
    check_prime(c1, p)
    if p % c1.a != 1 % c1.a:
        raise InvalidPrime(f"chains are built for primes 1 mod {c1.a}")
    n = zp_distance(c1, c2, p)
    chain = [c1]
    cur = c1
    while n > 0:
        step = None
        for m in neighbors(cur, p).members:
            try:
                if zp_distance(m, c2, p) == n - 1:
                    step = m
                    break
            except NotInZp:
                continue
        if step is None:
            raise NotInZp("no neighbor moves closer to the target")
        cur, n = step, n - 1
        chain.append(cur)
    if cur.key != c2.key:
        raise NotInZp("target is not reachable by neighbor steps")
    chain[-1] = c2
    return chain
