"""Exact univariate polynomial utilities.

Polynomials are sequences of coefficients in ascending degree order:
index i holds the t^i coefficient.  Integer routines (resultants,
discriminants) are fraction-free via Bareiss elimination; real-root
machinery (Sturm chains, bisection, interval Horner) runs on Fractions
so every reported bound is exact.  A dense mod-p toolkit provides
gcds, factor shapes and root counts at primes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def trim(f: Sequence) -> list:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Sequence) -> int:
    """Degree of f; the zero polynomial has degree -1."""
    d = len(f) - 1
    while d >= 0 and f[d] == 0:
        d -= 1
    return d


def poly_eval(f: Sequence, x):
    out = 0
    for c in reversed(list(f)):
        out = out * x + c
    return out


def poly_add(f: Sequence, g: Sequence) -> list:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def poly_sub(f: Sequence, g: Sequence) -> list:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0) for i in range(n)])


def poly_scale(f: Sequence, c) -> list:
    return trim([c * a for a in f])


def poly_mul(f: Sequence, g: Sequence) -> list:
    f, g = trim(f), trim(g)
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return trim(out)


def poly_deriv(f: Sequence) -> list:
    return trim([i * c for i, c in enumerate(f)][1:])


def poly_divmod(f: Sequence, g: Sequence) -> tuple[list, list]:
    """Quotient and remainder over the rationals."""
    g = trim([Fraction(c) for c in g])
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in f]
    dg = len(g) - 1
    lc = g[-1]
    q = [Fraction(0)] * max(0, len(r) - dg)
    while True:
        dr = degree(r)
        if dr < dg:
            break
        coef = r[dr] / lc
        q[dr - dg] = coef
        for i, gc in enumerate(g):
            r[dr - dg + i] -= coef * gc
        r[dr] = Fraction(0)
    return trim(q), trim(r)


def poly_gcd_q(f: Sequence, g: Sequence) -> list:
    """Monic gcd over the rationals (empty list for gcd of two zeros)."""
    a = trim([Fraction(c) for c in f])
    b = trim([Fraction(c) for c in g])
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lc = a[-1]
    return [c / lc for c in a]


def int_content(f: Sequence) -> int:
    out = 0
    for c in f:
        out = math.gcd(out, int(c))
    return out


def int_primitive(f: Sequence) -> list:
    """Primitive part with positive leading coefficient."""
    f = trim(f)
    if not f:
        return []
    c = int_content(f)
    if f[-1] < 0:
        c = -c
    return [int(a) // c for a in f]


def clear_denominators(f: Sequence) -> list:
    """Integer multiple of a rational polynomial, primitive, lc > 0."""
    f = [Fraction(c) for c in trim(f)]
    if not f:
        return []
    den = 1
    for c in f:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return int_primitive([int(c * den) for c in f])


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[-1][-1]


def sylvester_resultant(f: Sequence[int], g: Sequence[int]) -> int:
    f, g = trim(f), trim(g)
    if not f or not g:
        return 0
    m, n = len(f) - 1, len(g) - 1
    if m == 0 and n == 0:
        return 1
    if m == 0:
        return int(f[0]) ** n
    if n == 0:
        return int(g[0]) ** m
    size = m + n
    mat = [[0] * size for _ in range(size)]
    for r in range(n):
        for j in range(m + 1):
            mat[r][r + j] = f[m - j]
    for r in range(m):
        for j in range(n + 1):
            mat[n + r][r + j] = g[n - j]
    return bareiss_det(mat)


def discriminant(f: Sequence[int]) -> int:
    """Discriminant of an integer polynomial of degree >= 1."""
    f = trim(f)
    m = len(f) - 1
    if m < 1:
        raise ValueError("discriminant requires degree >= 1")
    if m == 1:
        return 1
    res = sylvester_resultant(f, poly_deriv(f))
    sign = -1 if (m * (m - 1) // 2) % 2 else 1
    num = sign * res
    lc = int(f[-1])
    if num % lc != 0:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return num // lc


def squarefree_part(f: Sequence[int]) -> list:
    """Primitive squarefree integer polynomial with the same real roots."""
    f = trim(f)
    if degree(f) < 1:
        return trim([int(c) for c in f])
    g = poly_gcd_q(f, poly_deriv(f))
    q, r = poly_divmod(f, g)
    if r:
        raise ArithmeticError("gcd does not divide the polynomial")
    return clear_denominators(q)


# ---------------------------------------------------------------------------
# Real roots via Sturm chains.  Input must be squarefree.

def sturm_chain(f: Sequence) -> list[list[Fraction]]:
    f = trim([Fraction(c) for c in f])
    chain = [f]
    d = poly_deriv(f)
    if d:
        chain.append(d)
    while degree(chain[-1]) > 0:
        r = poly_divmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def sign_variations(chain: Sequence[Sequence], x) -> int:
    signs = []
    for f in chain:
        v = poly_eval(f, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(chain: Sequence[Sequence], a, b) -> int:
    """Distinct real roots in (a, b]; endpoints must not be roots of f."""
    return sign_variations(chain, a) - sign_variations(chain, b)


def root_bound(f: Sequence) -> Fraction:
    """Cauchy bound: every real root lies strictly inside (-B, B)."""
    f = trim([Fraction(c) for c in f])
    if degree(f) < 1:
        return Fraction(1)
    lc = abs(f[-1])
    return 1 + max(abs(c) for c in f[:-1]) / lc


def _split_points(a: Fraction, b: Fraction):
    # Deterministic stream of interior rational points of (a, b).
    for den in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        for num in range(1, den):
            if math.gcd(num, den) == 1:
                yield a + (b - a) * Fraction(num, den)


def isolate_real_roots(f: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, one simple real root in each.

    f must be squarefree.  Every returned endpoint is a non-root, so the
    sign of f changes across each interval.
    """
    f = trim([Fraction(c) for c in f])
    if degree(f) < 1:
        return []
    chain = sturm_chain(f)
    bound = root_bound(f)
    out = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = count_roots(chain, a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        for mid in _split_points(a, b):
            if poly_eval(f, mid) != 0:
                break
        stack.append((a, mid))
        stack.append((mid, b))
    out.sort()
    return out


def refine_root(f: Sequence, a: Fraction, b: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval until b - a <= width (exact if rational)."""
    f = trim([Fraction(c) for c in f])
    a, b = Fraction(a), Fraction(b)
    fa = poly_eval(f, a)
    if fa == 0:
        return a, a
    if poly_eval(f, b) == 0:
        return b, b
    while b - a > width:
        mid = (a + b) / 2
        fm = poly_eval(f, mid)
        if fm == 0:
            return mid, mid
        if (fa < 0) != (fm < 0):
            b = mid
        else:
            a, fa = mid, fm
    return a, b


def interval_eval(f: Sequence, lo, hi) -> tuple[Fraction, Fraction]:
    """Exact interval-arithmetic Horner enclosure of f over [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    rlo = rhi = Fraction(0)
    for c in reversed(trim(f)):
        prods = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
        rlo, rhi = min(prods) + c, max(prods) + c
    return rlo, rhi


# ---------------------------------------------------------------------------
# Dense arithmetic mod p.

def pmod(f: Sequence[int], p: int) -> list[int]:
    return trim([int(c) % p for c in f])


def pmod_mul(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    f, g = trim(f), trim(g)
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % p
    return trim(out)


def pmod_sub(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def pmod_divmod(f: Sequence[int], g: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    g = trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero mod p")
    inv = pow(g[-1], -1, p)
    r = [int(c) % p for c in f]
    dg = len(g) - 1
    q = [0] * max(0, len(r) - dg)
    while True:
        dr = degree(r)
        if dr < dg:
            break
        coef = r[dr] * inv % p
        q[dr - dg] = coef
        for i, gc in enumerate(g):
            r[dr - dg + i] = (r[dr - dg + i] - coef * gc) % p
    return trim(q), trim(r)


def pmod_monic(f: Sequence[int], p: int) -> list[int]:
    f = trim(f)
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def pmod_gcd(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    a, b = pmod(f, p), pmod(g, p)
    while b:
        a, b = b, pmod_divmod(a, b, p)[1]
    return pmod_monic(a, p)


def pmod_powmod(base: Sequence[int], exp: int, modpoly: Sequence[int], p: int) -> list[int]:
    result = [1]
    acc = pmod_divmod(base, modpoly, p)[1]
    e = exp
    while e > 0:
        if e & 1:
            result = pmod_divmod(pmod_mul(result, acc, p), modpoly, p)[1]
        acc = pmod_divmod(pmod_mul(acc, acc, p), modpoly, p)[1]
        e >>= 1
    return result


def pmod_deriv(f: Sequence[int], p: int) -> list[int]:
    return trim([i * c % p for i, c in enumerate(f)][1:])


def root_count_mod_p(f: Sequence[int], p: int) -> int:
    """Number of distinct roots of f in Z/p (f must be nonzero mod p)."""
    fp = pmod(f, p)
    if not fp:
        raise ValueError("polynomial vanishes identically mod p")
    if degree(fp) == 0:
        return 0
    tp = pmod_powmod([0, 1], p, fp, p)
    diff = pmod_sub(tp, [0, 1], p)
    if not diff:
        return degree(fp)
    g = pmod_gcd(fp, diff, p)
    return degree(g)


def _sff(f: list[int], p: int) -> list[tuple[list[int], int]]:
    # Squarefree decomposition of monic f mod p: [(factor, multiplicity)].
    out: list[tuple[list[int], int]] = []
    d = pmod_deriv(f, p)
    if not d:
        c = f
        w = [1]
    else:
        c = pmod_gcd(f, d, p)
        w = pmod_divmod(f, c, p)[0]
    i = 1
    while degree(w) > 0:
        y = pmod_gcd(w, c, p)
        fac = pmod_divmod(w, y, p)[0]
        if degree(fac) > 0:
            out.append((fac, i))
        w = y
        c = pmod_divmod(c, y, p)[0]
        i += 1
    if degree(c) > 0:
        # c is a p-th power: c(t) = h(t)^p with h built from p-spaced coefficients.
        h = [c[j] for j in range(0, len(c), p)]
        for fac, m in _sff(h, p):
            out.append((fac, m * p))
    return out


def _ddf(f: list[int], p: int) -> list[tuple[int, int]]:
    # Distinct-degree split of squarefree monic f: [(degree, count)].
    out: list[tuple[int, int]] = []
    rem = f
    d = 1
    xp = [0, 1]
    while degree(rem) >= 2 * d:
        xp = pmod_powmod(xp, p, rem, p)
        diff = pmod_sub(xp, [0, 1], p)
        g = pmod_gcd(rem, diff, p) if diff else rem
        if degree(g) > 0:
            out.append((d, degree(g) // d))
            rem = pmod_divmod(rem, g, p)[0]
            if degree(rem) > 0:
                xp = pmod_divmod(xp, rem, p)[1]
        d += 1
    if degree(rem) > 0:
        out.append((degree(rem), 1))
    return out


def factor_shape_mod_p(f: Sequence[int], p: int) -> tuple[tuple[int, int], ...]:
    """Factorization shape of f mod p: ((degree, multiplicity), ...) sorted.

    One entry per irreducible factor.  The leading coefficient must be a
    unit mod p (monic inputs always qualify).
    """
    fp = pmod(f, p)
    if degree(fp) != degree(trim(f)):
        raise ValueError("leading coefficient vanishes mod p")
    if degree(fp) < 1:
        return ()
    shape = []
    for fac, mult in _sff(pmod_monic(fp, p), p):
        for deg, count in _ddf(fac, p):
            shape.extend([(deg, mult)] * count)
    return tuple(sorted(shape))


def poly_rem_int_monic(f: Sequence[int], g: Sequence[int]) -> list[int]:
    """Remainder of integer f modulo monic integer g (stays in Z)."""
    g = trim(g)
    if not g or g[-1] != 1:
        raise ValueError("modulus must be monic")
    r = [int(c) for c in f]
    dg = len(g) - 1
    while degree(r) >= dg:
        dr = degree(r)
        c = r[dr]
        for i in range(dg + 1):
            r[dr - dg + i] -= c * g[i]
    return trim(r)
