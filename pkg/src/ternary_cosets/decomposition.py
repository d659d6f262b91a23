"""Genus and spinor-genus theta averages, Hecke operators T(p^2) and theta = E + U + f."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, isqrt

from . import linalg as la
from .cosets import Coset, Lattice, scale_shift
from .enumeration import QSeries, estimated_points, representation_counts, short_vectors_with_norms, theta_series
from .isometry import ClassIndex
from .neighbors import (
    ClassList,
    InvalidPrime,
    check_prime,
    hensel_lift,
    isotropic_lines,
    neighbors,
    orthogonal_mod_p,
)

DIRECT_LIMIT = 3_000_000


def mass(cl: ClassList) -> Fraction:
    return cl.mass


def theta_average(cl: ClassList, precision: int, thetas=None) -> QSeries:
    if not cl.representatives:
        raise ValueError("empty class list")
    total = QSeries(precision)
    for i, (rep, o) in enumerate(cl.representatives):
        th = thetas[i] if thetas is not None else theta_series(rep, precision)
        total = total + th.scale(Fraction(1, o))
    return total.scale(1 / cl.mass)


def _counts_in_pK_lines(c: Coset, p: int, bound: int) -> list[int]:
    """#{x in aL+nu : Q(x) = p^2 n, x not in pL} for n <= bound, summed over isotropic lines.

    Such x reduce mod p to a nonzero isotropic vector, hence lie in exactly one
    lattice Z v' + p H_v with v' the Hensel lift of a line v and H_v = v^perp mod p.
    """
    gram = c.gram
    a = c.a
    pbar = la.mod_inverse(p, a)
    xi = [p * p * pbar * pbar * x for x in c.nu]  # in p^2 L, congruent to nu mod aL
    counts = [0] * (bound + 1)
    for v in isotropic_lines(gram, p):
        vl = hensel_lift(gram, v, p)
        gens = [tuple(p * t for t in z) for z in orthogonal_mod_p(gram, v, p)] + [vl]
        m = la.hnf_columns(gens)
        gm = la.gram_of(m, gram)
        scaled = tuple(tuple(x // (p * p) for x in row) for row in gm)
        assert all(x % (p * p) == 0 for row in gm for x in row)
        u = la.lll_reduce(scaled)
        m = la.matmul(m, u)
        scaled = la.to_int_matrix(la.gram_of(u, scaled))
        xi_m = la.to_int_matrix([la.matvec(la.inverse3(m), xi)])[0]
        sub = Coset(Lattice.from_gram(scaled), a, tuple(t % a for t in xi_m))
        for y, q in short_vectors_with_norms(sub, bound):
            x = la.matvec(m, y)
            if any(t % p for t in x):
                counts[q] += 1
    return counts


def scaled_counts(c: Coset, p: int, precision: int, method: str = "auto") -> tuple[list[int], str]:
    """[r(p^2 n, c) for n <= precision] and the method used ("direct" or "lines")."""
    if method == "auto":
        method = _auto_method(c, p, precision)
    if method == "direct":
        full = representation_counts(c, p * p * precision)
        return [full[p * p * n] for n in range(precision + 1)], method
    if method != "lines":
        raise ValueError(f"unknown method {method}")
    if c.theta_level % p == 0:
        raise InvalidPrime("the line decomposition needs p coprime to 4 N_L a^2")
    pbar = la.mod_inverse(p, c.a)
    inner = representation_counts(scale_shift(c, pbar), precision)  # x = p z with z in aL + pbar nu
    outer = _counts_in_pK_lines(c, p, precision)
    return [x + y for x, y in zip(inner, outer)], method


def hecke_T_p2(c: Coset, p: int, precision: int, method: str = "auto") -> QSeries:
    """T(p^2) applied to theta(c), in weight 3/2."""
    r_p2, _ = scaled_counts(c, p, precision, method)
    if c.theta_level % p == 0:
        return QSeries(precision, dict(enumerate(r_p2)))
    d = c.lattice.discriminant
    pbar = la.mod_inverse(p, c.a)
    r1 = representation_counts(scale_shift(c, pbar), precision)
    r2 = representation_counts(scale_shift(c, pbar * pbar), precision // (p * p))
    eps = la.kronecker(-1, p)
    c2 = la.kronecker(4 * d, p * p) * p
    out = {}
    for n in range(precision + 1):
        b = r_p2[n] + eps * la.kronecker(4 * d * n, p) * r1[n]
        if n % (p * p) == 0:
            b += c2 * r2[n // (p * p)]
        out[n] = b
    return QSeries(precision, out)


def hecke_on_series(f: QSeries, p: int, d_L: int, chi_p: int = 1) -> QSeries:
    """Weight 3/2 T(p^2) on a q-expansion with character chi * chi_{4 d_L}, chi(p) = chi_p."""
    prec = f.precision // (p * p)
    eps = la.kronecker(-1, p)
    out = {}
    for n in range(prec + 1):
        b = f[p * p * n] + la.kronecker(4 * d_L, p) * eps * la.kronecker(n, p) * chi_p * f[n]
        if n % (p * p) == 0:
            b += la.kronecker(4 * d_L, p * p) * p * chi_p * chi_p * f[n // (p * p)]
        out[n] = b
    return QSeries(prec, out)


@dataclass
class Report:
    name: str
    passed: bool
    violations: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.name, "passed": self.passed, "violations": self.violations, **self.detail}


def verify_eichler(c: Coset, p: int, precision: int, method: str = "auto", nbrs=None) -> Report:
    check_prime(c, p)
    lhs = hecke_T_p2(c, p, precision, method)
    nbrs = nbrs if nbrs is not None else neighbors(c, p)
    rhs = QSeries(precision)
    for m in nbrs.members:
        rhs = rhs + theta_series(m, precision)
    bad = lhs.differences(rhs)
    used = _auto_method(c, p, precision) if method == "auto" else method
    return Report(
        "eichler", not bad,
        [{"n": n, "hecke": str(lhs[n]), "neighbors": str(rhs[n])} for n in bad],
        {"prime": p, "precision": precision, "method": used, "neighbors": len(nbrs.members)},
    )


def _auto_method(c: Coset, p: int, precision: int) -> str:
    big = estimated_points(c, p * p * precision) > DIRECT_LIMIT
    return "lines" if big and c.theta_level % p else "direct"


def verify_genus_eigen(cl: ClassList, p: int, precision: int, method: str = "auto") -> Report:
    """T(p^2) theta_gen(aL+nu) = (p+1) theta_gen(aL + pbar nu)."""
    seed = cl.seed
    check_prime(seed, p)
    pbar = la.mod_inverse(p, seed.a)
    lhs = QSeries(precision)
    rhs = QSeries(precision)
    for rep, o in cl.representatives:
        w = Fraction(1, o)
        lhs = lhs + hecke_T_p2(rep, p, precision, method).scale(w)
        rhs = rhs + theta_series(scale_shift(rep, pbar), precision).scale(w)
    lhs = lhs.scale(1 / cl.mass)
    rhs = rhs.scale((p + 1) / cl.mass)
    bad = lhs.differences(rhs)
    return Report(
        "genus-eigen", not bad,
        [{"n": n, "lhs": str(lhs[n]), "rhs": str(rhs[n])} for n in bad],
        {"prime": p, "precision": precision, "classes": len(cl)},
    )


def scaled_class_list(cl: ClassList, s: int) -> ClassList:
    """Class list of the coset aL + s nu obtained by scaling every representative."""
    return ClassList(
        cl.kind, scale_shift(cl.seed, s),
        [(scale_shift(r, s), o) for r, o in cl.representatives],
        list(cl.primes_used), list(cl.validated_with),
    )


# ---------------------------------------------------------------- support


def _square_class(n: int) -> tuple[int, int]:
    t = la.squarefree_part(n)
    return t, isqrt(n // t)


def _b_for(M: int, t: int) -> int:
    rest = M // (4 * t)
    tp = la.squarefree_part(rest)
    return isqrt(rest // tp)


def support_check(U: QSeries, N_L: int, a: int, d_L: int, twists: dict | None = None) -> Report:
    """Square-class support of U, vanishing at multiples of b, b-periodicity and twists.

    ``twists`` optionally maps s (coprime to a) to the series U for aL + s nu,
    used for a_s(nm) = a_{s m^-1}(n) (-4 t d_L / m) with (m, M) = 1.
    """
    M = 4 * N_L * a * a
    problems = []
    classes: dict[int, dict[int, Fraction]] = {}
    for n in U.support():
        if n == 0:
            problems.append({"n": 0, "reason": "nonzero constant term"})
            continue
        t, m = _square_class(n)
        if M % (4 * t):
            problems.append({"n": n, "reason": f"square class t={t} with 4t not dividing {M}"})
            continue
        classes.setdefault(t, {})[m] = U[n] / m
    detail = {"level": M, "square_classes": {}}
    for t, seq in sorted(classes.items()):
        b = _b_for(M, t)
        detail["square_classes"][str(t)] = {"b": b}
        mmax = isqrt(U.precision // t)
        vals = {m: seq.get(m, Fraction(0)) for m in range(1, mmax + 1)}
        for m, v in vals.items():
            if v and m % b == 0:
                problems.append({"n": t * m * m, "reason": f"a({m}) != 0 although b={b} divides {m}"})
        for m, v in vals.items():
            if m > b and vals[m - b * ((m - 1) // b)] != v:
                problems.append({"n": t * m * m, "reason": f"a({m}) differs from a({m} mod {b})"})
        if twists:
            for s, Us in twists.items():
                for m in range(2, mmax + 1):
                    if gcd(m, M) != 1:
                        continue
                    sm = (s * la.mod_inverse(m, a)) % a
                    if sm not in twists:
                        continue
                    for n in range(1, mmax // m + 1):
                        lhs = Us[t * (n * m) ** 2] / (n * m)
                        rhs = twists[sm][t * n * n] / n * la.kronecker(-4 * t * d_L, m)
                        if lhs != rhs:
                            problems.append({"n": t * (n * m) ** 2, "reason": f"twist relation fails for s={s}, m={m}"})
    return Report("support", not problems, problems, detail)


# ---------------------------------------------------------------- unary thetas


@dataclass(frozen=True)
class UnaryTheta:
    """h(t u^2 z, psi) = sum_{n >= 1} psi(n) n q^{t u^2 n^2}."""

    t: int
    u: int
    modulus: int
    values: tuple  # psi(r) for r = 0, ..., modulus - 1
    label: str

    def series(self, precision: int) -> QSeries:
        step = self.t * self.u * self.u
        out = {}
        n = 1
        while step * n * n <= precision:
            v = self.values[n % self.modulus]
            if v:
                out[step * n * n] = Fraction(v) * n
            n += 1
        return QSeries(precision, out)


def _units(m: int) -> list[int]:
    return [r for r in range(m) if gcd(r, m) == 1]


def real_odd_characters(m: int) -> list[tuple[tuple, str]]:
    """Odd quadratic (or trivial-order-2) characters mod m, with Kronecker labels when found."""
    units = _units(m)
    out = []
    seen = set()
    for signs in product((1, -1), repeat=len(units)):
        val = dict(zip(units, signs))
        if val.get(1 % m) != 1:
            continue
        if any(val[(x * y) % m] != val[x] * val[y] for x in units for y in units):
            continue
        if val[(-1) % m] != -1:
            continue
        values = tuple(val.get(r, 0) for r in range(m))
        if values in seen:
            continue
        seen.add(values)
        out.append((values, _kronecker_label(values, m)))
    return out


def _kronecker_label(values, m) -> str:
    cands = {s * x for x in range(1, 4 * m + 1) for s in (1, -1)}
    # prefer fundamental-discriminant style labels such as (-4/.)
    for d in sorted(cands, key=lambda d: (d % 4 not in (0, 1), abs(d), d)):
        if all(la.kronecker(d, r) == values[r] for r in _units(m)):
            return f"({d}/.) mod {m}"
    return f"char mod {m} {values}"


def odd_delta_functions(m: int) -> list[tuple[tuple, str]]:
    """Rational basis of odd functions on (Z/m)^x: [n = r] - [n = -r]."""
    out = []
    for r in _units(m):
        if r < m - r:
            values = tuple(1 if x == r else -1 if x == m - r else 0 for x in range(m))
            out.append((values, f"delta({r})-delta({m - r}) mod {m}"))
    return out


def _exponent_at_most_2(m: int) -> bool:
    return all((r * r) % m == 1 % m for r in _units(m))


def unary_generators(M: int, ts=None) -> list[UnaryTheta]:
    """Spanning set h(t u^2 z, psi), psi odd mod m, 4 t m^2 u^2 | M."""
    gens = []
    if ts is None:
        ts = [t for t in range(1, M // 4 + 1) if (M // 4) % t == 0 and la.is_squarefree(t)]
    for t in ts:
        for m in range(1, M + 1):
            if M % (4 * t * m * m):
                continue
            funcs = real_odd_characters(m) if _exponent_at_most_2(m) else odd_delta_functions(m)
            for u in range(1, M + 1):
                if M % (4 * t * m * m * u * u):
                    continue
                for values, label in funcs:
                    gens.append(UnaryTheta(t, u, m, values, label))
    return gens


@dataclass
class UnaryFit:
    terms: list  # (UnaryTheta, Fraction)
    residual: QSeries
    inferred_t: list

    @property
    def exact(self) -> bool:
        return self.residual.is_zero()

    def to_json(self) -> dict:
        return {
            "terms": [
                {"t": g.t, "u": g.u, "modulus": g.modulus, "character": g.label, "coefficient": _fs(c)}
                for g, c in self.terms
            ],
            "residual": self.residual.to_json(),
            "inferred_t": self.inferred_t,
            "exact": self.exact,
        }


def _fs(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def solve_rational(columns: list[list[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """A solution of sum c_j columns[j] = target (free variables 0), or None."""
    rows = len(target)
    ncol = len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(ncol)] + [Fraction(target[i])] for i in range(rows)]
    pivots = []
    r = 0
    for j in range(ncol):
        piv = next((i for i in range(r, rows) if aug[i][j]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][j]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][j]:
                f = aug[i][j]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(j)
        r += 1
        if r == rows:
            break
    if any(aug[i][ncol] for i in range(r, rows)):
        return None
    sol = [Fraction(0)] * ncol
    for i, j in enumerate(pivots):
        sol[j] = aug[i][ncol]
    return sol


def fit_unary(U: QSeries, N_L: int, a: int, d_L: int, precision: int | None = None) -> UnaryFit:
    """Express U through unary theta series h(t u^2 z, psi) for the t occurring in U's support."""
    precision = U.precision if precision is None else min(precision, U.precision)
    U = U.truncate(precision)
    M = 4 * N_L * a * a
    ts = sorted({la.squarefree_part(n) for n in U.support() if n})
    ts = [t for t in ts if M % (4 * t) == 0]
    if U.is_zero():
        return UnaryFit([], QSeries(precision), [])
    gens = unary_generators(M, ts)
    series = [g.series(precision) for g in gens]
    idx = sorted(set().union(*(s.coeffs for s in series)) | set(U.coeffs))
    cols = [[s[n] for n in idx] for s in series]
    sol = solve_rational(cols, [U[n] for n in idx])
    if sol is None:
        # least-effort fallback: report everything as residual
        return UnaryFit([], U, ts)
    terms = [(g, c) for g, c in zip(gens, sol) if c]
    fitted = QSeries(precision)
    for g, c in terms:
        fitted = fitted + g.series(precision).scale(c)
    return UnaryFit(terms, U - fitted, ts)


# ---------------------------------------------------------------- decomposition


@dataclass
class DecompositionReport:
    E: QSeries
    U: QSeries
    f: QSeries
    theta: QSeries
    precision: int
    genus_classes: ClassList
    spinor_classes: ClassList
    support: Report
    unary_fit: UnaryFit | None = None

    @property
    def consistent(self) -> bool:
        return (self.E + self.U + self.f) == self.theta

    @property
    def passed(self) -> bool:
        return self.consistent and self.support.passed and (self.unary_fit is None or self.unary_fit.exact)

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "theta": self.theta.to_json(),
            "E": self.E.to_json(),
            "U": self.U.to_json(),
            "f": self.f.to_json(),
            "genus_classes": self.genus_classes.to_json(),
            "spinor_classes": self.spinor_classes.to_json(),
            "support_check": self.support.to_json(),
            "unary_fit": self.unary_fit.to_json() if self.unary_fit else None,
            "sum_matches_theta": self.consistent,
        }


class ClassListMismatch(ValueError):
    pass


def check_class_lists(c: Coset, genus: ClassList, spinor: ClassList, index: ClassIndex | None = None) -> None:
    index = index or ClassIndex()
    gk = {index.key(r) for r in genus.cosets()}
    sk = {index.key(r) for r in spinor.cosets()}
    if not sk <= gk:
        raise ClassListMismatch("spinor classes are not contained in the genus")
    if index.key(c) not in sk:
        raise ClassListMismatch("the coset's class is not among the spinor classes")


def decompose(
    c: Coset,
    genus: ClassList,
    spinor: ClassList,
    precision: int,
    fit: bool = False,
    index: ClassIndex | None = None,
    twists: bool = True,
) -> DecompositionReport:
    check_class_lists(c, genus, spinor, index)
    theta = theta_series(c, precision)
    E = theta_average(genus, precision)
    S = theta_average(spinor, precision)
    U = S - E
    f = theta - S
    tw = None
    if twists and c.a > 1:
        tw = {}
        for s in range(1, c.a):
            if gcd(s, c.a) == 1:
                if s == 1:
                    tw[s] = U
                else:
                    tw[s] = theta_average(scaled_class_list(spinor, s), precision) - theta_average(
                        scaled_class_list(genus, s), precision
                    )
    L = c.lattice
    sup = support_check(U, L.level, c.a, L.discriminant, tw)
    uf = fit_unary(U, L.level, c.a, L.discriminant, precision) if fit else None
    return DecompositionReport(E, U, f, theta, precision, genus, spinor, sup, uf)
