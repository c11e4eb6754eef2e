"""Sign-cancellation and prime-correlation statistics for form values.

Two experiment families share this module: normalized Liouville sums
over a growing square of arguments (sup over a scale window), and
von Mangoldt correlations compared against the exact local-density
product and its coprimality ("Cramer model") surrogate.  Density math
is exact rational; only final statistics are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import arith
from .errors import ResourceLimitError
from .forms import BinaryForm, CombinatorialCube, zero_count_mod, zero_count_mod_prime_fast
from .sieve import SieveTable

_GRID_BUDGET = 10**7


def exponent_cap(degree: int) -> float:
    """Largest admissible scale exponent for the sup statistic."""
    return 5.0 / (19.0 * degree)


def series_cutoff(x: float) -> int:
    """Prime cutoff exp(sqrt(log x)) used by the local product."""
    if x < 3:
        raise ValueError("x must be at least 3")
    return int(math.exp(math.sqrt(math.log(x))))


# ---------------------------------------------------------------------------
# Liouville sup statistic.

@dataclass(frozen=True)
class ChowlaStat:
    form: BinaryForm
    scale: int  # H
    exponent: float  # c
    grid: tuple[float, ...]
    statistic: float
    trace: tuple[tuple[float, float], ...]  # (x, |S(x)|/x^2) per grid point


def _chowla_grid(lo: float, hi: float, grid_size) -> list[float]:
    if grid_size == "all":
        # The double sum is constant between consecutive integers and the
        # normalizer 1/x^2 decreases, so the real sup over [lo, hi] is
        # attained at lo or just after an integer: checking lo and every
        # integer in (lo, hi] gives the exact supremum.
        xs = [lo] + [float(k) for k in range(math.floor(lo) + 1, math.floor(hi) + 1)]
        return xs
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1 or 'all'")
    xs = np.geomspace(lo, hi, int(grid_size)).tolist()
    return sorted(set([lo, hi] + xs))


def chowla_statistic(
    form: BinaryForm,
    scale: int,
    exponent: float,
    sieve: SieveTable,
    grid_size=16,
) -> ChowlaStat:
    """sup over the scale window [H^c, 2H^c] of |sum lambda(g(u,v))| / x^2.

    The sum runs over 1 <= u, v <= floor(x) and is maintained
    incrementally in one pass, so the full grid costs a single sweep.
    """
    d = form.degree
    if not 0 < exponent < exponent_cap(d):
        raise ValueError(f"exponent must lie in (0, {exponent_cap(d):.4f}) for degree {d}")
    if scale < 3:
        raise ValueError("scale must be >= 3")
    lo = float(scale) ** exponent
    hi = 2.0 * lo
    xs = _chowla_grid(lo, hi, grid_size)
    top = math.floor(hi)
    if top * top > _GRID_BUDGET:
        raise ResourceLimitError("scale window too large for the double-sum budget")
    if sum(abs(c) for c in form.coeffs) * max(top, 1) ** d >= 2**62:
        raise ResourceLimitError("form values overflow the int64 layer sums")

    # running sum over the square [1, n]^2, extended one layer at a time
    layer_sums = np.zeros(top + 1, dtype=np.int64)  # S(n^2 square)
    running = 0
    for n in range(1, top + 1):
        row_u = np.arange(1, n + 1, dtype=np.int64)
        vals_row = _eval_row(form, row_u, n)  # g(u, n), u <= n
        running += int(sieve.liouville_values(vals_row).sum(dtype=np.int64))
        if n > 1:
            col_v = np.arange(1, n, dtype=np.int64)
            vals_col = _eval_col(form, n, col_v)  # g(n, v), v < n
            running += int(sieve.liouville_values(vals_col).sum(dtype=np.int64))
        layer_sums[n] = running

    trace = []
    best = 0.0
    for x in xs:
        fl = min(math.floor(x), top)
        val = abs(int(layer_sums[fl])) / (x * x) if fl >= 1 else 0.0
        trace.append((float(x), val))
        best = max(best, val)
    return ChowlaStat(
        form=form,
        scale=scale,
        exponent=exponent,
        grid=tuple(float(x) for x in xs),
        statistic=best,
        trace=tuple(trace),
    )


def _eval_row(form: BinaryForm, us: np.ndarray, n: int) -> np.ndarray:
    acc = np.full(us.shape, form.coeffs[0], dtype=np.int64)
    npow = 1
    for c in form.coeffs[1:]:
        npow *= n
        acc = acc * us + c * npow
    return acc


def _eval_col(form: BinaryForm, m: int, vs: np.ndarray) -> np.ndarray:
    acc = np.full(vs.shape, form.coeffs[0] * m ** form.degree, dtype=np.int64)
    d = form.degree
    for i, c in enumerate(form.coeffs[1:], start=1):
        acc = acc + c * m ** (d - i) * vs**i
    return acc


@dataclass(frozen=True)
class ChowlaReport:
    samples: int
    threshold: float
    exceptional_fraction: float
    histogram_edges: tuple[float, ...]
    histogram_counts: tuple[int, ...]
    median: float
    statistics: tuple[float, ...]


def chowla_sample(
    cube: CombinatorialCube,
    scale: int,
    exponent: float,
    seed: int,
    index: int,
    sieve: SieveTable,
    grid_size=16,
) -> ChowlaStat:
    """Statistic of the index-th sampled form (pure in (seed, index))."""
    return chowla_statistic(cube.sample(seed, index), scale, exponent, sieve, grid_size)


def chowla_experiment(
    cube: CombinatorialCube,
    scale: int,
    exponent: float,
    samples: int,
    decay: float,
    seed: int,
    sieve: SieveTable,
    grid_size=16,
) -> ChowlaReport:
    """Fraction of sampled forms whose statistic exceeds (log H)^(-decay)."""
    if cube.dimension < 2:
        raise ValueError("experiment requires a cube of dimension >= 2")
    stats = [
        chowla_sample(cube, scale, exponent, seed, i, sieve, grid_size).statistic
        for i in range(samples)
    ]
    threshold = math.log(scale) ** (-decay)
    edges = np.linspace(0.0, 1.0, 21)
    counts, _ = np.histogram(stats, bins=edges)
    frac = sum(1 for s in stats if s > threshold) / samples if samples else 0.0
    return ChowlaReport(
        samples=samples,
        threshold=threshold,
        exceptional_fraction=frac,
        histogram_edges=tuple(float(e) for e in edges),
        histogram_counts=tuple(int(c) for c in counts),
        median=float(np.median(stats)) if stats else 0.0,
        statistics=tuple(stats),
    )


# ---------------------------------------------------------------------------
# Local-density product.

def singular_series(
    forms: Sequence[BinaryForm], x: float, cutoff: Optional[int] = None
) -> Fraction:
    """Product over p <= cutoff of (1-1/p)^(-r) (1 - Z(p)/p^2), exact.

    Z(p) counts zeros mod p of the product form g_1 * ... * g_r.  The
    default cutoff is exp(sqrt(log x)).  A prime dividing the product's
    content zeroes the whole product.
    """
    if not forms:
        raise ValueError("need at least one form")
    for g in forms:
        if g.is_zero:
            raise ValueError("forms must be nonzero")
    r = len(forms)
    product = forms[0]
    for g in forms[1:]:
        product = product * g
    bound = series_cutoff(x) if cutoff is None else int(cutoff)
    out = Fraction(1)
    for p in arith.primes(bound):
        if product.content % p == 0:
            return Fraction(0)
        z = zero_count_mod_prime_fast(product, p)
        out *= (1 - Fraction(1, p)) ** (-r) * (1 - Fraction(z, p * p))
        if out == 0:
            return out
    return out


# ---------------------------------------------------------------------------
# W-trick / coprimality model.

@dataclass(frozen=True)
class WTrick:
    cutoff: float
    modulus: int  # product of primes <= cutoff, squarefree
    density: Fraction  # W / phi(W)

    @classmethod
    def from_cutoff(cls, cutoff: float) -> "WTrick":
        ps = arith.primes(int(cutoff))
        W = 1
        phi = 1
        for p in ps:
            W *= p
            phi *= p - 1
        return cls(cutoff=float(cutoff), modulus=W, density=Fraction(W, phi))

    @classmethod
    def for_x(cls, x: float) -> "WTrick":
        if x < 3:
            raise ValueError("x must be at least 3")
        return cls.from_cutoff(math.exp(math.sqrt(math.log(x))))


def lambda_w(n: int, W: int) -> Fraction:
    """Coprimality density weight: W/phi(W) when gcd(n, W) = 1, else 0."""
    if W < 1:
        raise ValueError("W must be positive")
    if any(e > 1 for e in arith.factorize(W).values()):
        raise ValueError("W must be squarefree")
    if n == 0 or math.gcd(abs(n), W) != 1:
        return Fraction(0)
    return Fraction(W, arith.euler_phi(W))


# ---------------------------------------------------------------------------
# Correlations.

@dataclass(frozen=True)
class BHResult:
    forms: tuple[BinaryForm, ...]
    x: int
    w_cutoff: float
    w_modulus: int
    series: Fraction
    correlation: float  # C, von Mangoldt side
    cramer: Fraction  # C_w, exact
    deviation: float  # |C - series|
    deviation_w: float  # |C_w - series|

    @property
    def ratio(self) -> Optional[float]:
        return self.correlation / float(self.series) if self.series > 0 else None

    @property
    def ratio_w(self) -> Optional[float]:
        return float(self.cramer / self.series) if self.series > 0 else None


def _value_grids(forms: Sequence[BinaryForm], x: int) -> list[np.ndarray]:
    if x * x > _GRID_BUDGET:
        raise ResourceLimitError("correlation grid exceeds the budget")
    grids = []
    for g in forms:
        d = g.degree
        worst = sum(abs(c) for c in g.coeffs) * (x**d)
        if worst >= 2**62:
            raise ResourceLimitError("form values overflow the int64 grid")
        m = np.arange(1, x + 1, dtype=np.int64)[:, None]
        n = np.arange(1, x + 1, dtype=np.int64)[None, :]
        acc = np.full((x, x), g.coeffs[0], dtype=np.int64)
        npow = np.ones((1, x), dtype=np.int64)
        for c in g.coeffs[1:]:
            npow = npow * n
            acc = acc * m + c * npow
        grids.append(acc)
    return grids


def bh_correlation(
    forms: Sequence[BinaryForm],
    x: int,
    sieve: SieveTable,
    w_cutoff: Optional[float] = None,
    series_bound: Optional[int] = None,
) -> BHResult:
    """Both correlation sums plus the local-density product.

    C averages the product of von Mangoldt values of the r forms over
    (m, n) in [1, x]^2 (compensated float summation); the surrogate
    replaces each factor by the exact coprimality weight, so it is a
    rational number: density^r * #{coprime-to-W value tuples} / x^2.
    """
    if x < 2:
        raise ValueError("x must be >= 2")
    forms = tuple(forms)
    trick = WTrick.for_x(x) if w_cutoff is None else WTrick.from_cutoff(w_cutoff)
    series = singular_series(forms, x, cutoff=series_bound)
    grids = _value_grids(forms, x)

    prod = sieve.mangoldt_values(np.abs(grids[0]))
    for g in grids[1:]:
        prod = prod * sieve.mangoldt_values(np.abs(g))
    nonzero = prod[prod != 0.0]
    corr = math.fsum(nonzero.tolist()) / (x * x)

    W = trick.modulus
    mask = np.ones(grids[0].shape, dtype=bool)
    for g in grids:
        mask &= np.gcd(g % W, W) == 1
    cramer = trick.density ** len(forms) * Fraction(int(mask.sum()), x * x)

    return BHResult(
        forms=forms,
        x=x,
        w_cutoff=trick.cutoff,
        w_modulus=W,
        series=series,
        correlation=corr,
        cramer=cramer,
        deviation=abs(corr - float(series)),
        deviation_w=abs(float(cramer - series)),
    )


# ---------------------------------------------------------------------------
# Form admissibility and deterministic accepted-draw streams.

def is_irreducible(form: BinaryForm) -> bool:
    """Irreducibility over Q for degree <= 3 (no linear factor test)."""
    d = form.degree
    if d > 3:
        raise ValueError("irreducibility test implemented for degree <= 3 only")
    if form.is_zero:
        return False
    c = form.coeffs
    if d == 1:
        return True
    if c[0] == 0 or c[-1] == 0:
        return False  # u or v divides
    f = form.dehomogenized()  # ascending, f[0] = c_d != 0, lead = c_0 != 0
    for num in _divisors_of(abs(f[0])):
        for den in _divisors_of(abs(f[-1])):
            if math.gcd(num, den) != 1:
                continue
            for s in (1, -1):
                # root num*s/den iff sum f_i (num s)^i den^(d-i) = 0
                if sum(fc * (s * num) ** i * den ** (d - i) for i, fc in enumerate(f)) == 0:
                    return False
    return True


def _divisors_of(n: int) -> list[int]:
    out = [1]
    for p, e in arith.factorize(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def bh_admissible(form: BinaryForm, x: int, min_series: Fraction = Fraction(1, 5)) -> bool:
    """Accepts irreducible separable forms whose local product is not tiny."""
    if form.is_zero or not form.is_separable or not is_irreducible(form):
        return False
    return singular_series([form], x) >= min_series


def accepted_draw_index(
    cube: CombinatorialCube, seed: int, k: int, predicate, scan_limit: int = 10**5
) -> int:
    """Index of the k-th draw satisfying predicate, scanning from 0.

    Pure in (cube, seed, k, predicate), so parallel workers agree on the
    accepted stream regardless of scheduling.
    """
    found = -1
    for idx in range(scan_limit):
        if predicate(cube.sample(seed, idx)):
            found += 1
            if found == k:
                return idx
    raise ResourceLimitError("rejection sampling exhausted its scan budget")


def bh_sample(
    cube: CombinatorialCube,
    x: int,
    seed: int,
    k: int,
    sieve: SieveTable,
    min_series: Fraction = Fraction(1, 5),
) -> tuple[int, BHResult]:
    """Correlation result for the k-th admissible sampled form."""
    idx = accepted_draw_index(cube, seed, k, lambda g: bh_admissible(g, x, min_series))
    form = cube.sample(seed, idx)
    return idx, bh_correlation([form], x, sieve)
