"""Brute-force reference implementations used only by the tests."""

from fractions import Fraction
from itertools import permutations, product
from math import isqrt

import sympy

I3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def qform(g, x):
    return sum(g[i][j] * x[i] * x[j] for i in range(3) for j in range(3))


def coord_bounds(g, bound):
    """|x_i| <= sqrt(bound * (G^-1)_ii) for all x with Q(x) <= bound."""
    inv = sympy.Matrix(g).inv()
    return [isqrt(int(sympy.floor(bound * inv[i, i]))) + 1 for i in range(3)]


def box_scan(g, a, nu, bound):
    r = coord_bounds(g, bound)
    out = []
    for x in product(*(range(-ri, ri + 1) for ri in r)):
        if all((xi - ni) % a == 0 for xi, ni in zip(x, nu)) and qform(g, x) <= bound:
            out.append(x)
    return sorted(out)


def theta_brute(g, a, nu, bound):
    counts = [0] * (bound + 1)
    for x in box_scan(g, a, nu, bound):
        counts[qform(g, x)] += 1
    return counts


def legendre_by_squares(d, p):
    d %= p
    if d == 0:
        return 0
    return 1 if d in {(x * x) % p for x in range(1, p)} else -1


def kronecker_oracle(d, n):
    """Kronecker symbol from its definition: factor n and multiply local symbols."""
    if n == 0:
        return 1 if abs(d) == 1 else 0
    out = 1
    if n < 0:
        n = -n
        if d < 0:
            out = -out
    for p, e in sympy.factorint(n).items():
        if p == 2:
            if d % 2 == 0:
                s = 0
            else:
                s = 1 if d % 8 in (1, 7) else -1
        else:
            s = legendre_by_squares(d, p)
        out *= s**e
    return out


def in_module(cols, v):
    """Whether v is an integer combination of the (rational, independent) columns."""
    m = sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in c] for c in cols]).T
    sol = m.LUsolve(sympy.Matrix(v))
    return all(s.is_integer for s in sol)


def smith_diagonal(m):
    from sympy.matrices.normalforms import smith_normal_form

    s = smith_normal_form(sympy.Matrix(m), domain=sympy.ZZ)
    return tuple(sorted(abs(int(s[i, i])) for i in range(3)))


def signed_permutations():
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            m = [[0] * 3 for _ in range(3)]
            for i, j in enumerate(perm):
                m[j][i] = signs[i]
            yield tuple(tuple(r) for r in m)


def det3(m):
    return int(sympy.Matrix(m).det())


def proper_stabilizer_I3(a, nu):
    """Proper signed permutations fixing nu modulo a (all automorphisms of Z^3)."""
    count = 0
    for t in signed_permutations():
        if det3(t) != 1:
            continue
        img = [sum(t[i][j] * nu[j] for j in range(3)) for i in range(3)]
        if all((x - y) % a == 0 for x, y in zip(img, nu)):
            count += 1
    return count


def random_unimodular(rng, steps=6):
    m = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        k = rng.choice([-2, -1, 1, 2])
        for r in range(3):
            m[r][i] += k * m[r][j]
        if rng.random() < 0.3:
            i, j = rng.sample(range(3), 2)
            for r in range(3):
                m[r][i], m[r][j] = m[r][j], m[r][i]
    return tuple(tuple(r) for r in m)


def random_gram(rng, diag=(1, 4), off=2):
    """Positive definite integral Gram B^t D B with B upper unitriangular."""
    d = [rng.randint(*diag) for _ in range(3)]
    b = [[1, rng.randint(-off, off), rng.randint(-off, off)], [0, 1, rng.randint(-off, off)], [0, 0, 1]]
    g = [[sum(b[k][i] * d[k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    return tuple(tuple(r) for r in g)
