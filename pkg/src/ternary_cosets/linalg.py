"""Exact 3x3 integer/rational linear algebra and small number theory helpers.

Matrices are tuples of rows.  A lattice basis is stored column-wise: column j
of a basis matrix holds the coordinates of the j-th basis vector.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

Mat = tuple  # tuple[tuple[int | Fraction, ...], ...]


class SingularMatrixError(ValueError):
    pass


class NotSublatticeError(ValueError):
    pass


def mat(rows) -> Mat:
    return tuple(tuple(r) for r in rows)


def identity(n: int = 3) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def matmul(a: Mat, b: Mat) -> Mat:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Mat, v) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def columns(m: Mat) -> list[tuple]:
    return [tuple(c) for c in zip(*m)]


def from_columns(cols) -> Mat:
    return tuple(zip(*cols))


def det3(m: Mat):
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def adjugate3(m: Mat) -> Mat:
    (a, b, c), (d, e, f), (g, h, i) = m
    return (
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    )


def inverse3(m: Mat) -> Mat:
    d = det3(m)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    d = Fraction(d)
    return tuple(tuple(_norm(x / d) for x in row) for row in adjugate3(m))


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def to_fraction_matrix(m) -> Mat:
    return tuple(tuple(_norm(Fraction(x)) for x in row) for row in m)


def is_integral(m) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)


def to_int_matrix(m) -> Mat:
    if not is_integral(m):
        raise ValueError("matrix is not integral")
    return tuple(tuple(int(Fraction(x)) for x in row) for row in m)


def common_denominator(m) -> int:
    d = 1
    for row in m:
        for x in row:
            q = Fraction(x).denominator
            d = d * q // gcd(d, q)
    return d


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def mod_inverse(x: int, m: int) -> int:
    """Inverse of x modulo m, as an integer in [1, m); 1 when m == 1."""
    if m <= 0:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 1
    g, u, _ = xgcd(x % m, m)
    if g != 1:
        raise ValueError(f"{x} is not invertible modulo {m}")
    return u % m


def _hnf_int_columns(cols: list[list[int]]) -> Mat:
    n = 3
    active = [list(c) for c in cols]
    pivots: list[list[int] | None] = [None] * n
    for i in range(n - 1, -1, -1):
        nz = [c for c in active if c[i] != 0]
        zero = [c for c in active if c[i] == 0]
        if not nz:
            raise SingularMatrixError("generators do not span a full-rank module")
        piv = nz[0]
        for other in nz[1:]:
            g, x, y = xgcd(piv[i], other[i])
            u, v = piv[i] // g, other[i] // g
            new_piv = [x * p + y * o for p, o in zip(piv, other)]
            rest = [u * o - v * p for p, o in zip(piv, other)]
            piv = new_piv
            if any(rest):
                zero.append(rest)
        if piv[i] < 0:
            piv = [-t for t in piv]
        pivots[i] = piv
        active = zero
    h = [list(p) for p in pivots]  # h[j] is column j, zero below row j
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            q = h[j][i] // h[i][i]
            if q:
                h[j] = [a - q * b for a, b in zip(h[j], h[i])]
    return from_columns(tuple(tuple(c) for c in h))


def hnf_columns(cols) -> Mat:
    """Column HNF of the Z-module generated by the given (rational) vectors."""
    cols = [tuple(Fraction(x) for x in c) for c in cols]
    d = 1
    for c in cols:
        for x in c:
            d = d * x.denominator // gcd(d, x.denominator)
    icols = [[int(x * d) for x in c] for c in cols]
    h = _hnf_int_columns(icols)
    if d == 1:
        return h
    return tuple(tuple(_norm(Fraction(x, d)) for x in row) for row in h)


def hnf(m: Mat) -> Mat:
    """Upper-triangular column Hermite normal form of a nonsingular 3x3 matrix.

    The result spans the same Z-module as the columns of ``m``, has positive
    diagonal and entries right of the diagonal reduced into [0, h_ii).
    """
    if det3(m) == 0:
        raise SingularMatrixError("hnf requires a nonsingular matrix")
    return hnf_columns(columns(m))


def snf_diagonal(m: Mat) -> tuple[int, int, int]:
    """Smith invariants of a nonsingular integer 3x3 matrix via determinantal divisors."""
    m = to_int_matrix(m)
    d3 = abs(det3(m))
    if d3 == 0:
        raise SingularMatrixError("matrix is singular")
    g1 = 0
    for row in m:
        for x in row:
            g1 = gcd(g1, x)
    g2 = 0
    for r in ((0, 1), (0, 2), (1, 2)):
        for c in ((0, 1), (0, 2), (1, 2)):
            g2 = gcd(g2, m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]])
    return g1, g2 // g1, d3 // g2


def invariant_factors(sub_basis: Mat, basis: Mat) -> tuple[int, int, int]:
    """Elementary divisors of the module spanned by ``sub_basis`` inside ``basis``."""
    coords = matmul(inverse3(basis), sub_basis)
    if not is_integral(coords):
        raise NotSublatticeError("first module is not contained in the second")
    return snf_diagonal(coords)


def kronecker(d: int, n: int) -> int:
    """Kronecker-Jacobi-Legendre symbol (d/n)."""
    if n == 0:
        return 1 if d in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if d % 2 == 0:
            return 0
        if v % 2 and d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d/n), n odd positive
    a = d % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    f = 17
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def squarefree_part(n: int) -> int:
    s = 1
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            s *= p
    return s


def is_squarefree(n: int) -> bool:
    return n > 0 and squarefree_part(n) == n


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a modulo the odd prime p, or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def int_range_quadratic(a: int, b: int, c: int) -> tuple[int, int] | None:
    """Integer interval of t with a*t^2 + 2*b*t + c <= 0 (a > 0), or None if empty."""
    disc = b * b - a * c
    if disc < 0:
        return None
    s = isqrt(disc)
    lo = -((b + s) // a)  # ceil((-b - s) / a)
    hi = (s - b) // a
    if lo > hi:
        return None
    return lo, hi


def gram_of(basis: Mat, gram0: Mat) -> Mat:
    return matmul(matmul(transpose(basis), gram0), basis)


def lll_reduce(gram: Mat, delta: Fraction = Fraction(99, 100)) -> Mat:
    """LLL-reduce a positive definite integral Gram matrix.

    Returns the unimodular transform U (columns = new basis in old coordinates),
    followed by a greedy pass that shortens vectors with small combinations.
    """
    n = len(gram)
    g = [list(r) for r in gram]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]  # columns

    def col_op(j: int, k: int, q: int) -> None:
        # b_j <- b_j - q * b_k
        for r in range(n):
            u[r][j] -= q * u[r][k]
        for r in range(n):
            g[r][j] -= q * g[r][k]
        for r in range(n):
            g[j][r] -= q * g[k][r]

    def swap(j: int, k: int) -> None:
        for r in range(n):
            u[r][j], u[r][k] = u[r][k], u[r][j]
        g[j], g[k] = g[k], g[j]
        for r in range(n):
            g[r][j], g[r][k] = g[r][k], g[r][j]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bb = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = Fraction(g[i][j])
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * bb[k]
                mu[i][j] = s / bb[j]
            s = Fraction(g[i][i])
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * bb[k]
            bb[i] = s
        return mu, bb

    k = 1
    while k < n:
        mu, bb = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                col_op(k, j, q)
                mu, bb = gso()
        if bb[k] >= (delta - mu[k][k - 1] ** 2) * bb[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            k = max(k - 1, 1)

    # greedy shortening with coefficients in {-1, 0, 1}
    improved = True
    while improved:
        improved = False
        for j in range(n):
            others = [i for i in range(n) if i != j]
            best = None
            for c0 in (-1, 0, 1):
                for c1 in (-1, 0, 1):
                    if c0 == 0 and c1 == 0:
                        continue
                    cs = {others[0]: c0, others[1]: c1} if n == 3 else {others[0]: c0}
                    if n != 3 and c1:
                        continue
                    new = g[j][j]
                    for i, c in cs.items():
                        new += 2 * c * g[j][i]
                    for i, c in cs.items():
                        for i2, c2 in cs.items():
                            new += c * c2 * g[i][i2]
                    if new < g[j][j] and (best is None or new < best[0]):
                        best = (new, cs)
            if best is not None:
                for i, c in best[1].items():
                    col_op(j, i, -c)
                improved = True
    order = sorted(range(n), key=lambda i: (g[i][i], i))
    cols = [tuple(u[r][i] for r in range(n)) for i in order]
    return from_columns(cols)
