"""Number fields, norm forms, and their local and real value densities.

A field is a monic integer polynomial plus an integral-basis
multiplication table; the norm form is expanded once from the
multiplication-by-xi determinant.  Local data (splitting types, ideal
counts, the alpha/beta/b coefficients) is exact rational.  Real
densities come from lattice counts in a certified box region and a
Monte-Carlo volume estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import arith, polys
from .errors import ConfigError, IndexDivisorError, ResourceLimitError
from .rng import philox

_LATTICE_BUDGET = 10**8
_GAMMA_BUDGET = 10**8

# multivariate polynomials as {exponent tuple: integer coefficient}
MPoly = dict


def _mp_add(a: MPoly, b: MPoly) -> MPoly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
        if out[k] == 0:
            del out[k]
    return out


def _mp_mul(a: MPoly, b: MPoly) -> MPoly:
    out: MPoly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v != 0}


def _mp_neg(a: MPoly) -> MPoly:
    return {k: -v for k, v in a.items()}


def _mp_eval(a: MPoly, point: Sequence) -> object:
    total = 0
    for expo, coef in a.items():
        term = coef
        for x, e in zip(point, expo):
            for _ in range(e):
                term = term * x
        total = total + term
    return total


def _mp_partial(a: MPoly, i: int) -> MPoly:
    out: MPoly = {}
    for expo, coef in a.items():
        if expo[i] == 0:
            continue
        k = tuple(e - (1 if j == i else 0) for j, e in enumerate(expo))
        out[k] = out.get(k, 0) + coef * expo[i]
    return out


def _mp_eval_array(a: MPoly, pts: np.ndarray) -> np.ndarray:
    """Evaluate at float points of shape (n, e)."""
    total = np.zeros(len(pts), dtype=np.float64)
    for expo, coef in a.items():
        term = np.full(len(pts), float(coef))
        for j, e in enumerate(expo):
            if e:
                term *= pts[:, j] ** e
        total += term
    return total


def _mp_eval_int_arrays(a: MPoly, cols: list[np.ndarray]) -> np.ndarray:
    total = np.zeros(cols[0].shape, dtype=np.int64)
    for expo, coef in a.items():
        term = np.full(cols[0].shape, int(coef), dtype=np.int64)
        for j, e in enumerate(expo):
            for _ in range(e):
                term = term * cols[j]
        total = total + term
    return total


def _det_mpoly(mat: list[list[MPoly]]) -> MPoly:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    out: MPoly = {}
    for i in range(n):
        entry = mat[i][0]
        if not entry:
            continue
        minor = [row[1:] for j, row in enumerate(mat) if j != i]
        sub = _det_mpoly(minor)
        if i % 2:
            sub = _mp_neg(sub)
        out = _mp_add(out, _mp_mul(entry, sub))
    return out


@dataclass(frozen=True)
class NumberField:
    """Degree-e field given by a monic defining polynomial and a basis table.

    table[i][j][k] is the k-th coordinate of (basis_i * basis_j); the first
    basis element must be 1.  The index of the basis order in the maximal
    order gates which primes admit splitting data from plain polynomial
    factorization.
    """

    poly: tuple[int, ...]  # ascending, monic
    table: tuple  # e x e x e integers
    signature: tuple[int, int]
    index: Optional[int] = None
    name: str = "field"
    overrides: tuple = ()  # ((p, ((f, e), ...)), ...)

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def totally_imaginary(self) -> bool:
        return self.signature[0] == 0

    @classmethod
    def power_basis(
        cls,
        poly: Sequence[int],
        index: Optional[int] = None,
        signature: Optional[tuple[int, int]] = None,
        name: str = "field",
        overrides: Optional[dict] = None,
    ) -> "NumberField":
        poly = tuple(int(c) for c in poly)
        e = len(poly) - 1
        if e < 2:
            raise ValueError("field degree must be at least 2")
        if poly[-1] != 1:
            raise ValueError("defining polynomial must be monic")
        if _has_rational_root(poly):
            raise ValueError("defining polynomial has a rational root")
        if polys.discriminant(list(poly)) == 0:
            raise ValueError("defining polynomial is not separable")
        # theta^i * theta^j reduced mod the defining polynomial
        table = []
        for i in range(e):
            row = []
            for j in range(e):
                prod = [0] * (i + j) + [1]
                rem = polys.poly_rem_int_monic(prod, list(poly))
                rem = rem + [0] * (e - len(rem))
                row.append(tuple(rem[:e]))
            table.append(tuple(row))
        r1 = len(polys.isolate_real_roots(list(poly)))
        sig = (r1, (e - r1) // 2)
        if signature is not None and tuple(signature) != sig:
            raise ValueError(f"declared signature {signature} but computed {sig}")
        ov = tuple(sorted((int(p), tuple(tuple(x) for x in t)) for p, t in (overrides or {}).items()))
        return cls(poly=poly, table=tuple(table), signature=sig, index=index, name=name, overrides=ov)

    def multiply(self, a: Sequence, b: Sequence):
        """Coordinates of the product of two basis-coordinate vectors."""
        e = self.degree
        out = [0] * e
        for i in range(e):
            if a[i] == 0:
                continue
            for j in range(e):
                if b[j] == 0:
                    continue
                coef = a[i] * b[j]
                for k in range(e):
                    m = self.table[i][j][k]
                    if m:
                        out[k] = out[k] + coef * m
        return out

    def to_json(self) -> str:
        data = {
            "poly": list(self.poly),
            "basis": "power",
            "signature": list(self.signature),
        }
        if self.index is not None:
            data["index"] = self.index
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, name: str = "field") -> "NumberField":
        data = json.loads(text)
        if data.get("basis", "power") != "power":
            raise ConfigError("only power-basis field files are supported")
        sig = tuple(data["signature"]) if "signature" in data else None
        return cls.power_basis(data["poly"], index=data.get("index"), signature=sig, name=name)


def _has_rational_root(poly: tuple[int, ...]) -> bool:
    # candidates num/den with num | poly[0], den | lead; monic -> integer roots
    c0 = poly[0]
    if c0 == 0:
        return True
    for r in _divisors(abs(c0)):
        for s in (r, -r):
            if polys.poly_eval([Fraction(c) for c in poly], Fraction(s)) == 0:
                return True
    return False


def _divisors(n: int) -> list[int]:
    out = [1]
    for p, e in arith.factorize(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def field_presets() -> dict[str, NumberField]:
    return {
        "gaussian": NumberField.power_basis([1, 0, 1], index=1, name="gaussian"),
        "sqrt2": NumberField.power_basis([-2, 0, 1], index=1, name="sqrt2"),
        "cbrt2": NumberField.power_basis([-2, 0, 0, 1], index=1, name="cbrt2"),
        "coray": NumberField.power_basis([-7, 14, -7, 1], index=1, name="coray"),
    }


# ---------------------------------------------------------------------------
# Norm form.

class NormForm:
    """The degree-e form det of multiplication by y1*w1 + ... + ye*we."""

    def __init__(self, field: NumberField):
        self.field = field
        e = field.degree
        mat: list[list[MPoly]] = [[{} for _ in range(e)] for _ in range(e)]
        for i in range(e):
            for j in range(e):
                for k in range(e):
                    m = field.table[i][j][k]
                    if m:
                        expo = tuple(1 if t == i else 0 for t in range(e))
                        mat[k][j] = _mp_add(mat[k][j], {expo: m})
        self.poly: MPoly = _det_mpoly(mat)
        self.partials: tuple[MPoly, ...] = tuple(_mp_partial(self.poly, i) for i in range(e))
        self._self_check()

    def _self_check(self):
        e = self.field.degree
        e1 = tuple([1] + [0] * (e - 1))
        if self(e1) != 1:
            raise ValueError("norm form does not send the first basis vector to 1")
        rng = philox(0, "normcheck", *self.field.poly)
        y = [int(v) for v in rng.integers(-9, 10, size=e)]
        if self([2 * t for t in y]) != 2**e * self(y):
            raise ValueError("norm form is not homogeneous of the right degree")
        grad = [_mp_eval(g, y) for g in self.partials]
        if e * self(y) != sum(gi * yi for gi, yi in zip(grad, y)):
            raise ValueError("norm form fails the Euler identity")
        if self(y) != self.eval_det(y):
            raise ValueError("expanded norm disagrees with the determinant")

    def __call__(self, y: Sequence):
        if len(y) != self.field.degree:
            raise ValueError(f"expected {self.field.degree} coordinates")
        return _mp_eval(self.poly, y)

    def eval_det(self, y: Sequence[int]) -> int:
        """Exact determinant of the multiplication matrix at integer y."""
        e = self.field.degree
        if len(y) != e:
            raise ValueError(f"expected {e} coordinates")
        mat = [[0] * e for _ in range(e)]
        for i in range(e):
            if y[i] == 0:
                continue
            for j in range(e):
                for k in range(e):
                    m = self.field.table[i][j][k]
                    if m:
                        mat[k][j] += y[i] * m
        return polys.bareiss_det(mat)

    def gradient(self, y: Sequence):
        return [_mp_eval(g, y) for g in self.partials]

    def eval_float(self, pts: np.ndarray) -> np.ndarray:
        return _mp_eval_array(self.poly, pts)

    def eval_int_grid(self, cols: list[np.ndarray]) -> np.ndarray:
        return _mp_eval_int_arrays(self.poly, cols)

    def min_abs_on_unit_sphere(self, grid: int = 201) -> float:
        """min |N| over the sup-norm unit sphere, by dense grid sampling.

        Zero for fields whose norm form vanishes on the sphere (any field
        with a real embedding); used only to bound representation search.
        """
        e = self.field.degree
        if self.field.signature[0] > 0:
            return 0.0
        ax = np.linspace(-1.0, 1.0, grid)
        best = math.inf
        # each face of the sphere: one coordinate pinned to +-1
        for j in range(e):
            rest = [ax] * (e - 1)
            mesh = np.meshgrid(*rest, indexing="ij") if e > 1 else []
            pts = np.empty((ax.size ** (e - 1), e))
            col = 0
            for t in range(e):
                if t == j:
                    pts[:, t] = 1.0
                else:
                    pts[:, t] = mesh[col].ravel()
                    col += 1
            vals = np.abs(self.eval_float(pts))
            best = min(best, float(vals.min()))
        return best


# ---------------------------------------------------------------------------
# Splitting data and Dedekind coefficients.

def splitting_type(field: NumberField, p: int) -> tuple[tuple[int, int], ...]:
    """Residue degrees and ramification indices (f_i, e_i) above p.

    Valid via factorization of the defining polynomial only when p does
    not divide the index of the power order; declared overrides win.
    """
    if not arith.is_prime(p):
        raise ValueError(f"{p} is not prime")
    for q, t in field.overrides:
        if q == p:
            return t
    if field.index is None:
        disc = polys.discriminant(list(field.poly))
        if disc % (p * p) == 0:
            raise IndexDivisorError(
                f"p={p} may divide the basis-order index; supply an override"
            )
    elif field.index % p == 0:
        raise IndexDivisorError(f"p={p} divides the declared index {field.index}")
    return polys.factor_shape_mod_p(list(field.poly), p)


@dataclass(frozen=True)
class DedekindLocal:
    """Per-prime ideal-count data derived from a splitting type."""

    p: int
    shape: tuple[tuple[int, int], ...]  # (f_i, e_i)
    degree: int

    @classmethod
    def build(cls, field: NumberField, p: int) -> "DedekindLocal":
        return cls(p=p, shape=splitting_type(field, p), degree=field.degree)

    def ideal_count(self, j: int) -> int:
        """Number of ideals of norm p^j: multisets over primes above p."""
        fs = [f for f, _ in self.shape]
        counts = [0] * (j + 1)
        counts[0] = 1
        for f in fs:
            for t in range(f, j + 1):
                counts[t] += counts[t - f]
        return counts[j]

    def alpha(self) -> Fraction:
        out = (1 - Fraction(1, self.p)) ** (-1)
        for f, _ in self.shape:
            out *= 1 - Fraction(1, self.p**f)
        return out

    def beta(self, k: int) -> Fraction:
        """p^k times the tail sum of ideal counts over norms, exact."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        p = self.p
        full = Fraction(1)
        lead = Fraction(1)
        for f, _ in self.shape:
            full *= (1 - Fraction(1, p**f)) ** (-1)
            lead *= 1 - Fraction(1, p**f)
        head = sum(Fraction(self.ideal_count(j), p**j) for j in range(k))
        return Fraction(p**k) * (full - head) * lead

    def r_tilde(self, j: int, k_trunc: int) -> Fraction:
        if j < k_trunc:
            return Fraction(self.ideal_count(j))
        return self.beta(k_trunc) / self.alpha()

    def b(self, j: int, k_trunc: int) -> Fraction:
        """Moebius convolution coefficient at p^j."""
        if j == 0:
            return Fraction(1)
        return self.r_tilde(j, k_trunc) - self.r_tilde(j - 1, k_trunc)


def b_coeff(field: NumberField, k: int, k_trunc: int) -> Fraction:
    """Multiplicative extension of the per-prime-power b values."""
    if k < 1:
        raise ValueError("k must be positive")
    out = Fraction(1)
    for p, j in arith.factorize(k).items():
        out *= DedekindLocal.build(field, p).b(j, k_trunc)
    return out


# ---------------------------------------------------------------------------
# gamma densities.

@lru_cache(maxsize=256)
def norm_residue_counts(field: NumberField, q: int) -> np.ndarray:
    """Histogram over a in Z/q of #{s in (Z/q)^e : N(s) = a mod q}."""
    e = field.degree
    if q**e > _GAMMA_BUDGET:
        raise ResourceLimitError(f"gamma enumeration budget exceeded at q={q}")
    norm = NormForm(field)
    counts = np.zeros(q, dtype=np.int64)
    rest_size = q ** (e - 1)
    rest_cols: list[np.ndarray] = []
    if e > 1:
        mesh = np.meshgrid(*([np.arange(q, dtype=np.int64)] * (e - 1)), indexing="ij")
        rest_cols = [m.ravel() for m in mesh]
    # chunk the leading coordinate so the working set stays small
    chunk = max(1, 10**7 // rest_size)
    for start in range(0, q, chunk):
        lead = np.arange(start, min(start + chunk, q), dtype=np.int64)
        cols = [np.repeat(lead, rest_size)]
        cols.extend(np.tile(m, len(lead)) for m in rest_cols)
        vals = np.zeros(cols[0].shape, dtype=np.int64)
        for expo, coef in norm.poly.items():
            term = np.full(cols[0].shape, int(coef) % q, dtype=np.int64)
            for j, ex in enumerate(expo):
                for _ in range(ex):
                    term = term * cols[j] % q
            vals = (vals + term) % q
        counts += np.bincount(vals, minlength=q)
    return counts


def gamma_density(field: NumberField, q: int, a: int) -> Fraction:
    """q^-(e-1) times the count of basis vectors with norm a mod q."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if q == 1:
        return Fraction(1)
    out = Fraction(1)
    for p, k in arith.factorize(q).items():
        pk = p**k
        counts = norm_residue_counts(field, pk)
        out *= Fraction(int(counts[a % pk]), pk ** (field.degree - 1))
    return out


def gamma_many(field: NumberField, q: int, residues: np.ndarray) -> np.ndarray:
    """gamma_density over an int array of residues, as float64."""
    residues = np.asarray(residues)
    if q == 1:
        return np.ones(residues.shape, dtype=np.float64)
    out = np.ones(residues.shape, dtype=np.float64)
    for p, k in arith.factorize(q).items():
        pk = p**k
        counts = norm_residue_counts(field, pk)
        idx = (residues % pk).astype(np.int64)
        out *= counts[idx] / float(pk ** (field.degree - 1))
    return out


# ---------------------------------------------------------------------------
# Certified box regions and lattice counting.

class RegionB:
    """Box |x - x1| < kappa (sup norm) with N(x1) = sign/2, scaled by B.

    Certification: on a 32^e grid over the closed box, some partial
    derivative of N stays at least half its basepoint magnitude after
    subtracting a Lipschitz margin for off-grid points.
    """

    def __init__(self, norm: NormForm, sign: int, B: float, x1=None, kappa=None):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if B < 1:
            raise ValueError("scale B must be >= 1")
        self.norm = norm
        self.sign = sign
        self.B = float(B)
        e = norm.field.degree
        self.x1 = tuple(float(v) for v in (x1 if x1 is not None else _basepoint(norm, sign)))
        if abs(norm.eval_float(np.array([self.x1]))[0] - sign / 2) > 1e-12:
            raise ValueError("basepoint does not hit sign/2")
        self.coord, self.kappa, self.cert_inf = _certify_kappa(
            norm, self.x1, kappa_start=kappa
        )
        self._hist: Optional[dict[int, int]] = None
        lo, hi = _mp_box_range(norm.poly, self.x1, self.kappa)
        self.support = (lo * self.B**e, hi * self.B**e)

    @property
    def volume(self) -> float:
        e = self.norm.field.degree
        return (2 * self.kappa * self.B) ** e

    def lattice_bounds(self) -> list[tuple[int, int]]:
        out = []
        for c in self.x1:
            lo = math.ceil(self.B * (c - self.kappa))
            hi = math.floor(self.B * (c + self.kappa))
            out.append((lo, hi))
        return out

    def histogram(self) -> dict[int, int]:
        """Exact counts of each norm value over lattice points of B*box."""
        if self._hist is not None:
            return self._hist
        bounds = self.lattice_bounds()
        total = 1
        for lo, hi in bounds:
            total *= max(0, hi - lo + 1)
        if total > _LATTICE_BUDGET:
            raise ResourceLimitError("lattice box exceeds the point budget")
        worst = max(abs(b) for lohi in bounds for b in lohi) + 1
        coef_norm = sum(abs(c) for c in self.norm.poly.values())
        if coef_norm * worst ** self.norm.field.degree >= 2**62:
            raise ResourceLimitError("norm values overflow the integer grid")
        axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        vals = self.norm.eval_int_grid(mesh)
        uniq, cnt = np.unique(vals.ravel(), return_counts=True)
        self._hist = {int(u): int(c) for u, c in zip(uniq, cnt)}
        return self._hist

    def lattice_point_count(self) -> int:
        total = 1
        for lo, hi in self.lattice_bounds():
            total *= max(0, hi - lo + 1)
        return total


def _basepoint(norm: NormForm, sign: int) -> tuple[float, ...]:
    e = norm.field.degree
    if sign == 1:
        return tuple([2.0 ** (-1 / e)] + [0.0] * (e - 1))
    if norm.field.totally_imaginary:
        raise ValueError("norm form is nonnegative; no negative-sign region exists")
    # box search for a lattice vector of negative norm, then rescale
    best = None
    for radius in range(1, 21):
        rng_axes = range(-radius, radius + 1)
        stack = [[]]
        for _ in range(e):
            stack = [s + [v] for s in stack for v in rng_axes]
        for v in stack:
            if max(abs(t) for t in v) != radius:
                continue
            val = norm.eval_det(v)
            if val < 0 and (best is None or abs(val) < abs(best[1])):
                best = (v, val)
        if best is not None:
            break
    if best is None:
        raise ValueError("no negative-norm lattice vector found in the search box")
    v, val = best
    scale = (2.0 * abs(val)) ** (-1 / e)
    return tuple(scale * t for t in v)


def _certify_kappa(norm: NormForm, x1, kappa_start=None):
    e = norm.field.degree
    g0 = [abs(float(v)) for v in norm.gradient(list(x1))]
    j = int(np.argmax(g0))
    target = g0[j] / 2
    if g0[j] == 0:
        raise ValueError("norm gradient vanishes at the basepoint")
    kappa = float(kappa_start) if kappa_start else 0.25 * max(abs(v) for v in x1)
    grid_n = 32 if e <= 3 else 12
    for _ in range(60):
        R = max(abs(v) for v in x1) + kappa
        lip = 0.0
        for i in range(e):
            second = _mp_partial(norm.partials[j], i)
            lip += sum(abs(c) * R ** (sum(expo) ) for expo, c in second.items())
        axes = [np.linspace(c - kappa, c + kappa, grid_n) for c in x1]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = np.abs(_mp_eval_array(norm.partials[j], pts))
        margin = lip * (kappa / (grid_n - 1))
        cert = float(vals.min()) - margin
        if cert >= target:
            return j, kappa, cert
        kappa /= 2
    raise ValueError("could not certify a gradient-stable box radius")


def _mp_box_range(poly: MPoly, center, kappa) -> tuple[float, float]:
    lo, hi = 0.0, 0.0
    for expo, coef in poly.items():
        tlo, thi = float(coef), float(coef)
        for j, e in enumerate(expo):
            if e == 0:
                continue
            a, b = center[j] - kappa, center[j] + kappa
            cands = [a**e, b**e] + ([0.0] if a < 0 < b else [])
            mlo, mhi = min(cands), max(cands)
            tlo, thi = min(tlo * mlo, tlo * mhi, thi * mlo, thi * mhi), max(
                tlo * mlo, tlo * mhi, thi * mlo, thi * mhi
            )
        lo += tlo
        hi += thi
    return lo, hi


def count_RK(norm: NormForm, n: int, region: RegionB) -> int:
    """#{lattice points in the scaled box with norm exactly n}."""
    return region.histogram().get(int(n), 0)


# ---------------------------------------------------------------------------
# Monte-Carlo real density.

@dataclass(frozen=True)
class DensityProfile:
    """Shared MC sample of norm values over a region, reusable per query."""

    region: RegionB
    samples: int
    seed: int
    values: np.ndarray  # sorted norm values at sampled points
    half_width: float

    @classmethod
    def draw(cls, region: RegionB, samples: int, seed: int, half_width=None) -> "DensityProfile":
        if samples < 10**3:
            raise ValueError("need at least 1000 samples")
        e = region.norm.field.degree
        h = float(half_width) if half_width else region.B**e / 200.0
        rng = philox(seed, "omega", samples)
        pts = rng.uniform(-1.0, 1.0, size=(samples, e)) * region.kappa + np.asarray(region.x1)
        vals = region.norm.eval_float(pts) * region.B**e
        return cls(
            region=region,
            samples=samples,
            seed=seed,
            values=np.sort(vals),
            half_width=h,
        )

    def estimate(self, y: float) -> tuple[float, float]:
        """(density estimate, standard error) at value y."""
        lo = np.searchsorted(self.values, y - self.half_width, side="left")
        hi = np.searchsorted(self.values, y + self.half_width, side="right")
        hits = int(hi - lo)
        phat = hits / self.samples
        scale = self.region.volume / (2 * self.half_width)
        se = math.sqrt(phat * (1 - phat) / self.samples) * scale
        return phat * scale, se

    def aggregate(self, ys: Sequence[float], weights: Sequence[float]) -> tuple[float, float]:
        """Weighted sum of densities over shared samples, with its MC error.

        Computes T(v) = sum of weights of query windows containing v per
        sampled value v, so the variance accounts for window overlap.
        """
        ys = np.asarray(ys, dtype=np.float64)
        ws = np.asarray(weights, dtype=np.float64)
        order = np.argsort(ys)
        ys, ws = ys[order], ws[order]
        csum = np.concatenate([[0.0], np.cumsum(ws)])
        lo = np.searchsorted(ys, self.values - self.half_width, side="left")
        hi = np.searchsorted(ys, self.values + self.half_width, side="right")
        per_sample = csum[hi] - csum[lo]
        scale = self.region.volume / (2 * self.half_width)
        mean = float(per_sample.mean())
        var = float(per_sample.var(ddof=1)) if self.samples > 1 else 0.0
        est = mean * scale
        se = math.sqrt(var / self.samples) * scale
        return est, se


def omega_density(
    norm: NormForm,
    y: float,
    region: RegionB,
    samples: int,
    seed: int,
    half_width=None,
) -> tuple[float, float]:
    """MC estimate of the real density of norm values near y."""
    if region.norm.field != norm.field:
        raise ValueError("region was built for a different norm form")
    prof = DensityProfile.draw(region, samples, seed, half_width)
    return prof.estimate(float(y))
