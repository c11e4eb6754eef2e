"""Local-global solvability of N_K(x) = g(u,v) != 0 and its counting data.

Covers the real and p-adic solvability tests with Hensel certificates,
the exact local densities sigma, the lattice counting function and its
localized (gamma times real-density) model, rational point search, and
the sampling experiment that compares the two solvable classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import arith, forms, normforms, polys
from .errors import ResourceLimitError
from .forms import BinaryForm
from .normforms import (
    DensityProfile,
    NormForm,
    NumberField,
    RegionB,
    _mp_partial,
    gamma_many,
    norm_residue_counts,
)

_SEED_BUDGET = 2 * 10**6
_FRONTIER_CAP = 60000
_SIGMA_BUDGET = 10**8
_VALUE_BUDGET = 10**8

# Full-scale parameter formulas.  The products they imply dwarf any
# enumeration budget, so the desk defaults below stand in for them and
# these closed forms exist for formula-level checks only.
def full_scale_precision(x: float, d: int, A: float) -> int:
    return int(1000 * d * A * math.floor(math.log(math.log(x))))


def full_scale_w(x: float) -> float:
    return math.exp(math.sqrt(math.log(x)))


DESK_K = 2
DESK_W = 7
DESK_M = 20


@dataclass(frozen=True)
class ChateletInstance:
    """The equation N_K(x) = g(u, v) != 0 for a fixed field and form."""

    field: NumberField
    form: BinaryForm

    def __post_init__(self):
        if self.form.degree % self.field.degree != 0:
            raise ValueError("the field degree must divide the form degree")

    @property
    def e(self) -> int:
        return self.field.degree

    @property
    def d(self) -> int:
        return self.form.degree

    @property
    def power_ratio(self) -> int:
        return self.d // self.e

    @cached_property
    def norm(self) -> NormForm:
        return NormForm(self.field)

    def in_S(self, H: int) -> bool:
        c = self.form.coeffs
        return max(abs(v) for v in c) <= H and c[0] * c[-1] != 0

    @property
    def content(self) -> int:
        return self.form.content

    def bad_primes(self) -> tuple[int, ...]:
        """Primes dividing disc(K-poly), disc(g), or the edge coefficients."""
        out: set[int] = set()
        for v in (
            polys.discriminant(list(self.field.poly)),
            self.form.coeffs[0],
            self.form.coeffs[-1],
            0 if self.form.is_zero else self.form.discriminant(),
        ):
            if v != 0:
                out.update(arith.factorize(abs(v)))
        return tuple(sorted(out))


def make_instance(field: NumberField, coeffs: Sequence[int]) -> ChateletInstance:
    return ChateletInstance(field=field, form=BinaryForm(coeffs))


# ---------------------------------------------------------------------------
# Real solvability.

def real_solvable(instance: ChateletInstance, sign: int) -> Optional[bool]:
    """Does the sign range of N_K meet the sign-`sign` values of g?

    None when the certified extreme enclosures straddle zero and the
    verdict cannot be settled.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = instance.form
    if g.is_zero:
        return False
    if sign == -1 and instance.field.totally_imaginary:
        return False
    if g.degree % 2 == 1:
        # odd degree: g(-u,-v) = -g(u,v), both signs are attained
        return True
    ext = forms.extremes(g)
    if sign == 1:
        lo, hi = ext.b_plus  # enclosure of the maximum on the sup sphere
        if lo > 0:
            return True
        if hi <= 0:
            return False
        return None
    lo, hi = ext.b_minus
    if hi < 0:
        return True
    if lo >= 0:
        return False
    return None


# ---------------------------------------------------------------------------
# p-adic solvability with Hensel certificates.

@dataclass(frozen=True)
class PadicVerdict:
    kind: str  # "yes" | "no" | "unknown"
    alpha: Optional[int]
    level: int
    witness: Optional[tuple] = None

    @property
    def solvable(self) -> Optional[bool]:
        return {"yes": True, "no": False}.get(self.kind)


def _form_mpoly(form: BinaryForm) -> dict:
    d = form.degree
    return {(d - i, i): c for i, c in enumerate(form.coeffs) if c != 0}


def _eval_members_mod(poly: dict, pts: list[tuple], q: int) -> list[int]:
    """Values of an exponent-dict polynomial at integer points, mod q."""
    if not pts:
        return []
    if q < 2**31:
        cols = [np.array([pt[i] for pt in pts], dtype=np.int64) % q for i in range(len(pts[0]))]
        acc = np.zeros(len(pts), dtype=np.int64)
        for expo, coef in poly.items():
            term = np.full(len(pts), int(coef) % q, dtype=np.int64)
            for j, ex in enumerate(expo):
                for _ in range(ex):
                    term = term * cols[j] % q
            acc = (acc + term) % q
        return [int(v) for v in acc]
    out = []
    for pt in pts:
        total = 0
        for expo, coef in poly.items():
            term = coef
            for x, ex in zip(pt, expo):
                term *= x**ex
            total += term
        out.append(total % q)
    return out


def _vp_residue(a: int, p: int, level: int) -> int:
    """Valuation of a residue mod p^level; the zero residue reports level."""
    if a % (p**level) == 0:
        return level
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _grad_valuation(partials: Sequence[dict], pt: tuple, p: int, cap: int) -> int:
    best = cap
    for g in partials:
        val = 0
        for expo, coef in g.items():
            term = coef
            for x, ex in zip(pt, expo):
                term *= x**ex
            val += term
        if val == 0:
            continue
        v = 0
        while val % p == 0 and v < cap:
            val //= p
            v += 1
        best = min(best, v)
        if best == 0:
            return 0
    return best


def _seed_side(poly: dict, partials: Sequence[dict], nvars: int, p: int, primitive: bool):
    """Level-1 scan: residues a with a smooth preimage become wildcard
    classes; singular points are kept as explicit members keyed by value."""
    if p**nvars > _SEED_BUDGET:
        raise ResourceLimitError(f"level-1 residue scan too large at p={p}")
    grids = np.indices((p,) * nvars).reshape(nvars, -1)
    cols = [g.astype(np.int64) for g in grids]
    if primitive:
        keep = np.zeros(cols[0].shape, dtype=bool)
        for c in cols:
            keep |= c % p != 0
        cols = [c[keep] for c in cols]
    vals = np.zeros(cols[0].shape, dtype=np.int64)
    for expo, coef in poly.items():
        term = np.full(cols[0].shape, int(coef) % p, dtype=np.int64)
        for j, ex in enumerate(expo):
            for _ in range(ex):
                term = term * cols[j] % p
        vals = (vals + term) % p
    smooth = np.zeros(cols[0].shape, dtype=bool)
    for part in partials:
        pv = np.zeros(cols[0].shape, dtype=np.int64)
        for expo, coef in part.items():
            term = np.full(cols[0].shape, int(coef) % p, dtype=np.int64)
            for j, ex in enumerate(expo):
                for _ in range(ex):
                    term = term * cols[j] % p
            pv = (pv + term) % p
        smooth |= pv != 0
    wild = {int(a) for a in np.unique(vals[smooth])}
    members: dict[int, list[tuple]] = {}
    sing_idx = np.nonzero(~smooth)[0]
    for i in sing_idx:
        pt = tuple(int(c[i]) for c in cols)
        members.setdefault(int(vals[i]), []).append(pt)
    return wild, members


def _lift_members(poly: dict, parents: list[tuple], nvars: int, p: int, level: int):
    """Children of the given residues one level up, grouped by new value."""
    q = p ** (level + 1)
    if len(parents) * p**nvars > _FRONTIER_CAP:
        raise ResourceLimitError("p-adic frontier exceeded the budget")
    shifts = np.indices((p,) * nvars).reshape(nvars, -1).T * (p**level)
    children: list[tuple] = []
    for pt in parents:
        for sh in shifts:
            children.append(tuple(int(b) + int(s) for b, s in zip(pt, sh)))
    vals = _eval_members_mod(poly, children, q)
    out: dict[int, list[tuple]] = {}
    for v, ch in zip(vals, children):
        out.setdefault(v, []).append(ch)
    return out


def padic_solvable(
    instance: ChateletInstance, p: int, max_precision: Optional[int] = None
) -> PadicVerdict:
    """Certificate search for solutions of N_K(x) = g(s,t) over Z_p.

    Level-by-level lift of the residue solution set with (s,t) kept
    primitive; a point at level j >= 2*alpha + 1 whose combined gradient
    has valuation alpha and whose value residue is nonzero enough
    certifies yes(alpha).  An empty match set certifies no.  Residues
    with a smooth one-sided preimage are tracked as whole classes: the
    smooth side can hit any target value in them.
    """
    if not arith.is_prime(p):
        raise ValueError(f"{p} is not prime")
    e, d = instance.e, instance.d
    k = max_precision if max_precision is not None else 2 * e + 3
    if k < 1:
        raise ValueError("max_precision must be at least 1")
    g = instance.form
    if g.is_zero:
        return PadicVerdict("no", None, 0)
    content = g.content
    disc_poly = polys.discriminant(list(instance.field.poly))
    if p > max(d, e) and e % p != 0 and disc_poly % p != 0 and content % p != 0:
        # good prime: g has a unit value on some primitive pair, the
        # residue norm map is onto, and the Euler identity gives a unit
        # partial, so a smooth level-1 solution always exists
        return PadicVerdict("yes", 0, 1)

    norm = instance.norm
    n_poly = dict(norm.poly)
    n_partials = [dict(pp) for pp in norm.partials]
    g_poly = _form_mpoly(g)
    g_partials = [_mp_partial(g_poly, 0), _mp_partial(g_poly, 1)]

    n_wild, n_mem = _seed_side(n_poly, n_partials, e, p, primitive=False)
    g_wild, g_mem = _seed_side(g_poly, g_partials, 2, p, primitive=True)

    overlap = n_wild & g_wild
    if overlap:
        # both sides realize every value in the class exactly; pick any
        # nonzero common target
        return PadicVerdict("yes", 0, 1)

    for level in range(1, k + 1):
        matched_n: set[int] = set()
        matched_g: set[int] = set()
        best: Optional[tuple[int, int, tuple]] = None  # (alpha, value, witness)
        for a in sorted(set(n_mem) & set(g_mem)):
            matched_n.add(a)
            matched_g.add(a)
            mu_n, wx = min(
                (_grad_valuation(n_partials, pt, p, level), pt) for pt in n_mem[a]
            )
            mu_g, wst = min(
                (_grad_valuation(g_partials, pt, p, level), pt) for pt in g_mem[a]
            )
            alpha = min(mu_n, mu_g)
            if level >= 2 * alpha + 1 and _vp_residue(a, p, level) < level - alpha:
                if best is None or alpha < best[0]:
                    best = (alpha, a, (wx, wst))
        if best is not None:
            alpha, _, witness = best
            return PadicVerdict("yes", alpha, level, witness)
        # one-sided smooth classes match any member whose value lies in
        # them; once the member's value residue is pinned nonzero the
        # smooth side meets it exactly
        for a in n_mem:
            if a % p in g_wild:
                matched_n.add(a)
                if _vp_residue(a, p, level) < level:
                    return PadicVerdict("yes", 0, level, (min(n_mem[a]), None))
        for a in g_mem:
            if a % p in n_wild:
                matched_g.add(a)
                if _vp_residue(a, p, level) < level:
                    return PadicVerdict("yes", 0, level, (None, min(g_mem[a])))
        if not matched_n and not matched_g:
            return PadicVerdict("no", None, level)
        if level == k:
            return PadicVerdict("unknown", None, level)
        n_mem = _lift_members(
            n_poly, [pt for a in matched_n for pt in n_mem[a]], e, p, level
        )
        g_mem = _lift_members(
            g_poly, [pt for a in matched_g for pt in g_mem[a]], 2, p, level
        )
    return PadicVerdict("unknown", None, k)


# ---------------------------------------------------------------------------
# Local sigma densities.

def _g_residue_counts(form: BinaryForm, q: int) -> np.ndarray:
    """Histogram over a in Z/q of #{(s,t) in (Z/q)^2 : g(s,t) = a}."""
    if q * q > _SIGMA_BUDGET:
        raise ResourceLimitError(f"form residue scan too large at q={q}")
    counts = np.zeros(q, dtype=np.int64)
    step = max(1, 10**7 // q)
    for u0 in range(0, q, step):
        rows = forms._value_rows(form, q, np.arange(u0, min(u0 + step, q), dtype=np.int64))
        counts += np.bincount(rows.ravel(), minlength=q)
    return counts


def sigma_pp(instance: ChateletInstance, p: int, k: int) -> Fraction:
    """Joint density of N_K(x) = g(s,t) mod p^k over all residues."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return Fraction(1)
    q = p**k
    e = instance.e
    if q**max(e, 2) > _SIGMA_BUDGET:
        raise ResourceLimitError(f"sigma enumeration budget exceeded at {p}^{k}")
    cnt_n = norm_residue_counts(instance.field, q)
    cnt_g = _g_residue_counts(instance.form, q)
    joint = int(np.dot(cnt_n, cnt_g))
    return Fraction(joint, q ** (e + 1))


def w0_primes(instance: ChateletInstance, m_dk: int) -> tuple[int, ...]:
    """Primes below the field threshold plus all content divisors."""
    ps = set(arith.primes(m_dk))
    c = instance.content
    if c > 0:
        ps.update(arith.factorize(c))
    return tuple(sorted(ps))


@dataclass(frozen=True)
class LocalDensityData:
    h_c: int
    w0_factors: tuple[tuple[int, int], ...]  # (p, exponent)
    w1_factors: tuple[tuple[int, int], ...]
    p_c: tuple[int, ...]
    sigma_w0: Fraction
    c_c: Fraction

    @property
    def W0(self) -> int:
        out = 1
        for p, k in self.w0_factors:
            out *= p**k
        return out

    @property
    def W1(self) -> int:
        out = 1
        for p, k in self.w1_factors:
            out *= p**k
        return out

    @property
    def W_powered(self) -> int:
        return self.W0 * self.W1


def sigma_mod(instance: ChateletInstance, q: int) -> Fraction:
    """Density of N_K(x) = g(s,t) mod q over all of (Z/q)^(e+2), any q >= 1."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if q == 1:
        return Fraction(1)
    e = instance.e
    if q**max(e, 2) > _SIGMA_BUDGET:
        raise ResourceLimitError(f"sigma enumeration budget exceeded at q={q}")
    cnt_n = norm_residue_counts(instance.field, q)
    cnt_g = _g_residue_counts(instance.form, q)
    return Fraction(int(np.dot(cnt_n, cnt_g)), q ** (e + 1))


def local_density_data(
    instance: ChateletInstance,
    m_dk: int = DESK_M,
    w_desk: int = DESK_W,
    k_desk: int = DESK_K,
) -> LocalDensityData:
    """The split modulus W0*W1, the first-power prime set, and densities."""
    if min(m_dk, w_desk, k_desk) < 1:
        raise ValueError("desk parameters must be positive")
    if instance.form.is_zero:
        raise ValueError("the zero form has no local density data")
    w0 = w0_primes(instance, m_dk)
    h_c = instance.content
    w1 = tuple(p for p in arith.primes(w_desk) if p > m_dk and h_c % p != 0)
    sigma = Fraction(1)
    for p in w0:
        sigma *= sigma_pp(instance, p, k_desk)
    c_c = Fraction(1)
    for p in w1:
        c_c *= normforms.DedekindLocal.build(instance.field, p).alpha()
    return LocalDensityData(
        h_c=h_c,
        w0_factors=tuple((p, k_desk) for p in w0),
        w1_factors=tuple((p, k_desk) for p in w1),
        p_c=w1,
        sigma_w0=sigma,
        c_c=c_c,
    )


def sigma_W0(
    instance: ChateletInstance,
    m_dk: int = DESK_M,
    w_desk: int = DESK_W,
    k_desk: int = DESK_K,
) -> Fraction:
    return local_density_data(instance, m_dk, w_desk, k_desk).sigma_w0


def c_de(d: int, e: int) -> int:
    """Exponent of the log-power loss in the lower-bound shape."""
    return e + d**2 * (d + 1) ** (e + 2)


def euler_product_lower(
    instance: ChateletInstance,
    w_desk: int = DESK_W,
    m_dk: int = DESK_M,
    k_desk: int = DESK_K,
) -> float:
    """Product of alpha_p * xi_p over the first-power primes, xi truncated.

    xi_p folds the form's zero counts mod p^j against the truncated ideal
    count convolution; the result must come out positive.
    """
    data_primes = tuple(
        p for p in arith.primes(w_desk) if p > m_dk and instance.content % p != 0
    )
    total = Fraction(1)
    cap = k_desk * instance.e
    for p in data_primes:
        loc = normforms.DedekindLocal.build(instance.field, p)
        xi = Fraction(1)
        for j in range(1, cap + 1):
            bj = loc.b(j, k_desk)
            if bj == 0:
                continue
            lam = forms.zero_count_prime_power(instance.form, p, j)
            xi += bj * Fraction(lam, p ** (2 * j))
        term = loc.alpha() * xi
        if term <= 0:
            raise ArithmeticError(f"nonpositive local factor at p={p}")
        total *= term
    return float(total)


# ---------------------------------------------------------------------------
# Counting functions.

def default_B(instance: ChateletInstance, x: int, H_tilde: float) -> float:
    return H_tilde ** (1 / instance.e) * x ** (instance.d / instance.e)


def model_W(w_desk: int, k_desk: int) -> int:
    """The localized model's modulus: every prime up to the cutoff, powered."""
    out = 1
    for p in arith.primes(w_desk):
        out *= p**k_desk
    return out


def _value_table(instance: ChateletInstance, x: int) -> tuple[np.ndarray, np.ndarray]:
    """g(m, n) for -x <= m, n <= x with n != 0, as flat int64 arrays (m kept
    for witnesses is unnecessary: only the multiset of values matters)."""
    if x < 1:
        raise ValueError("x must be at least 1")
    d = instance.d
    worst = (sum(abs(c) for c in instance.form.coeffs) + 1) * x**d
    if worst >= 2**62:
        raise ResourceLimitError("form values overflow the integer grid")
    if (2 * x + 1) ** 2 > _VALUE_BUDGET:
        raise ResourceLimitError("value grid exceeds the enumeration budget")
    ms = np.arange(-x, x + 1, dtype=np.int64)
    ns = np.concatenate([np.arange(-x, 0), np.arange(1, x + 1)]).astype(np.int64)
    mg, ng = np.meshgrid(ms, ns, indexing="ij")
    acc = np.full(mg.shape, int(instance.form.coeffs[0]), dtype=np.int64)
    npow = np.ones(ng.shape, dtype=np.int64)
    for c in instance.form.coeffs[1:]:
        npow = npow * ng
        acc = acc * mg + int(c) * npow
    return acc.ravel(), ng.ravel()


def count_Nc(
    instance: ChateletInstance, x: int, region: RegionB, B: Optional[float] = None
) -> int:
    """Exact solution count over |m|,|n| <= x, n != 0, via the histogram."""
    if B is not None and abs(B - region.B) > 1e-9 * max(1.0, region.B):
        raise ValueError("region was built for a different scale B")
    vals, _ = _value_table(instance, x)
    hist = region.histogram()
    uniq, cnt = np.unique(vals, return_counts=True)
    total = 0
    for u, c in zip(uniq, cnt):
        total += hist.get(int(u), 0) * int(c)
    return total


def localized_Nc(
    instance: ChateletInstance,
    x: int,
    region: RegionB,
    W_powered: int,
    mc_samples: int = 20000,
    seed: int = 0,
    profile: Optional[DensityProfile] = None,
) -> tuple[float, float]:
    """Model count: sum of gamma(W, g(m,n)) * omega_hat(g(m,n)).

    The gamma weight is exact per residue class; omega_hat comes from one
    shared Monte-Carlo draw whose variance is propagated through the
    weighted sum.
    """
    vals, _ = _value_table(instance, x)
    if profile is None:
        profile = DensityProfile.draw(region, mc_samples, seed)
    weights = gamma_many(instance.field, W_powered, vals)
    return profile.aggregate(vals.astype(np.float64), weights)


# ---------------------------------------------------------------------------
# Rational point search.

def _sqrt_minus_one(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ArithmeticError(f"no quadratic nonresidue found mod {p}")


def _cornacchia_two_squares(p: int) -> tuple[int, int]:
    """x^2 + y^2 = p for a prime p = 1 mod 4, by the Euclid descent."""
    a, b = p, _sqrt_minus_one(p)
    while b * b > p:
        a, b = b, a % b
    r = b
    s2 = p - r * r
    s = math.isqrt(s2)
    if s * s != s2:
        raise ArithmeticError(f"descent failed at p={p}")
    return r, s


def two_squares(n: int) -> Optional[tuple[int, int]]:
    """Some (a, b) with a^2 + b^2 = n, or None when no representation exists."""
    if n < 0:
        return None
    if n == 0:
        return (0, 0)
    odd = n
    while odd % 2 == 0:
        odd //= 2
    if odd % 4 == 3:
        return None
    for p in (3, 7, 11, 19, 23, 31, 43, 47):
        v = 0
        while odd % p == 0:
            odd //= p
            v += 1
        if v % 2 == 1:
            return None
    a, b = 1, 0
    for p, k in arith.factorize(n).items():
        if p == 2:
            r, s = 1, 1
        elif p % 4 == 1:
            r, s = _cornacchia_two_squares(p)
        else:
            if k % 2 == 1:
                return None
            a, b = a * p ** (k // 2), b * p ** (k // 2)
            continue
        for _ in range(k):
            a, b = a * r - b * s, a * s + b * r
    assert a * a + b * b == n
    return (abs(a), abs(b))


class _OpBudget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int) -> bool:
        self.used += n
        return self.used <= self.limit


def _represent_by_norm(
    instance: ChateletInstance, val: int, budget: _OpBudget
) -> Optional[tuple[int, ...]]:
    """Find integral x with N_K(x) = val, or None (absent or out of budget)."""
    norm = instance.norm
    e = instance.e
    if instance.field.poly == (1, 0, 1):
        if not budget.spend(max(1, round(math.log(abs(val) + 2)))):
            return None
        rep = two_squares(val)
        return rep if rep is not None else None
    if instance.field.totally_imaginary:
        floor = norm.min_abs_on_unit_sphere()
        radius = math.ceil((abs(val) / floor) ** (1 / e)) if floor > 0 else 0
    else:
        # indefinite norm: no sound radius exists; search a heuristic box
        radius = math.ceil(abs(val) ** (1 / e)) * 3 + 3
    if radius <= 0:
        return None
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    count = (2 * radius + 1) ** e
    if not budget.spend(count):
        return None
    if count > 10**7:
        return None
    mesh = np.meshgrid(*([axis] * e), indexing="ij")
    vals = norm.eval_int_grid(list(mesh))
    hit = np.nonzero(vals == val)
    if len(hit[0]) == 0:
        return None
    idx = tuple(int(h[0]) for h in hit)
    return tuple(int(mesh[i][idx]) for i in range(e))


def search_rational_point(
    instance: ChateletInstance, height_bound: int, time_budget: int = 10**7
) -> Optional[tuple[tuple[int, ...], int, int]]:
    """First (x, m, n) with N_K(x) = g(m, n) != 0, n != 0, gcd(m,n) = 1.

    Scans pairs in increasing height max(|m|, |n|); the budget counts
    evaluation work so exhaustion is deterministic.  Absence of a witness
    proves nothing.
    """
    if height_bound < 1:
        raise ValueError("height bound must be at least 1")
    g = instance.form
    if g.is_zero:
        return None
    budget = _OpBudget(time_budget)
    odd = g.degree % 2 == 1
    for h in range(1, height_bound + 1):
        pairs = []
        for m in range(-h, h + 1):
            pairs.append((m, h))
            if abs(m) == h:
                pairs.extend((m, n) for n in range(1, h))
        for m, n in pairs:
            if math.gcd(m, n) != 1:
                continue
            cands = ((m, n), (-m, -n)) if odd else ((m, n),)
            for mm, nn in cands:
                if not budget.spend(1):
                    return None
                val = g(mm, nn)
                if val == 0:
                    continue
                x = _represent_by_norm(instance, val, budget)
                if x is not None:
                    assert instance.norm.eval_det(list(x)) == val == g(mm, nn)
                    assert nn != 0
                    return (tuple(int(t) for t in x), mm, nn)
            if budget.used > budget.limit:
                return None
    return None


# ---------------------------------------------------------------------------
# The sampling experiment.

_CLASSES = ("not-in-S", "locally-obstructed", "rational-point-found", "unknown")


@dataclass(frozen=True)
class HasseSample:
    index: int
    coeffs: tuple[int, ...]
    klass: str
    witness: Optional[tuple]
    padic: tuple[tuple[int, str], ...]  # (prime, verdict kind or yes(alpha))
    obstruction: Optional[str]
    Nc: Optional[int]
    Nc_hat: Optional[float]
    Nc_err: Optional[float]
    sigma_w0: Optional[float]


@dataclass(frozen=True)
class HasseReport:
    samples: tuple[HasseSample, ...]
    counts: dict
    ratio_lower_bound: Optional[float]
    ratio_full_coverage: Optional[float]  # restricted to fully tested samples
    budget_limited: int
    violations: int
    positive_fraction: float
    quantile_curves: dict
    params: dict


def tested_primes(instance: ChateletInstance, prime_cutoff: int) -> tuple[int, ...]:
    ps = set(arith.primes(prime_cutoff))
    ps.update(instance.bad_primes())
    return tuple(sorted(ps))


def classify_coeffs(
    field: NumberField,
    coeffs: Sequence[int],
    H: int,
    height_bound: int,
    prime_cutoff: int,
    time_budget: int = 10**7,
) -> tuple[str, Optional[tuple], list[tuple[int, str]], Optional[str]]:
    """(class, witness, per-prime verdicts, obstruction note) for one form."""
    coeffs = tuple(int(c) for c in coeffs)
    if max(abs(c) for c in coeffs) > H or coeffs[0] * coeffs[-1] == 0:
        return "not-in-S", None, [], None
    inst = ChateletInstance(field=field, form=BinaryForm(coeffs))
    plus = real_solvable(inst, 1)
    minus = real_solvable(inst, -1)
    if plus is False and minus is False:
        return "locally-obstructed", None, [], "real place"
    verdicts: list[tuple[int, str]] = []
    for p in tested_primes(inst, prime_cutoff):
        try:
            v = padic_solvable(inst, p)
        except ResourceLimitError:
            verdicts.append((p, "budget"))
            continue
        tag = f"yes({v.alpha})" if v.kind == "yes" else v.kind
        verdicts.append((p, tag))
        if v.kind == "no":
            return "locally-obstructed", None, verdicts, f"p={p}"
    witness = search_rational_point(inst, height_bound, time_budget)
    if witness is not None:
        x, m, n = witness
        return "rational-point-found", (x, m, n), verdicts, None
    return "unknown", None, verdicts, None


def hasse_sample(
    field: NumberField,
    cube: forms.CombinatorialCube,
    H: int,
    seed: int,
    index: int,
    height_bound: int,
    prime_cutoff: int,
    region: RegionB,
    profile: DensityProfile,
    x_count: int,
    m_dk: int,
    w_desk: int,
    k_desk: int,
    time_budget: int = 10**7,
) -> HasseSample:
    """Classification plus counting data for one sampled coefficient vector.

    Pure in (seed, index) given the shared read-only region and profile.
    """
    form = cube.sample(seed, index)
    klass, witness, verdicts, obstruction = classify_coeffs(
        field, form.coeffs, H, height_bound, prime_cutoff, time_budget
    )
    Nc = Nc_hat = Nc_err = sigma = None
    if klass != "not-in-S":
        inst = ChateletInstance(field=field, form=form)
        data = local_density_data(inst, m_dk, w_desk, k_desk)
        Nc = count_Nc(inst, x_count, region)
        est, err = localized_Nc(
            inst, x_count, region, model_W(w_desk, k_desk), profile=profile
        )
        Nc_hat, Nc_err = float(est), float(err)
        sigma = float(data.sigma_w0)
    return HasseSample(
        index=index,
        coeffs=form.coeffs,
        klass=klass,
        witness=witness,
        padic=tuple(verdicts),
        obstruction=obstruction,
        Nc=Nc,
        Nc_hat=Nc_hat,
        Nc_err=Nc_err,
        sigma_w0=sigma,
    )


def _quantiles(values: Sequence[float]) -> dict:
    if not values:
        return {}
    arr = np.sort(np.asarray(values, dtype=np.float64))
    pick = lambda q: float(arr[min(len(arr) - 1, int(q * len(arr)))])
    return {
        "min": float(arr[0]),
        "q25": pick(0.25),
        "median": pick(0.5),
        "q75": pick(0.75),
        "max": float(arr[-1]),
    }


def hasse_experiment(
    cube: forms.CombinatorialCube,
    field: NumberField,
    H: int,
    height_bound: int,
    prime_cutoff: int,
    samples: int,
    seed: int = 0,
    x_count: int = 20,
    m_dk: int = DESK_M,
    w_desk: int = DESK_W,
    k_desk: int = DESK_K,
    mc_samples: int = 20000,
    time_budget: int = 10**7,
) -> HasseReport:
    """Sampled comparison of the rational and locally-solvable classes.

    The headline ratio is a certified lower bound: found over found plus
    unknown, with obstructed samples excluded from the denominator and
    the unknown class never silently folded away.
    """
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    norm = NormForm(field)
    B = default_B(ChateletInstance(field=field, form=cube.sample(seed, 0)), x_count, H)
    region = RegionB(norm, 1, B)
    region.histogram()
    profile = DensityProfile.draw(region, mc_samples, seed)
    recs = [
        hasse_sample(
            field, cube, H, seed, i, height_bound, prime_cutoff, region, profile,
            x_count, m_dk, w_desk, k_desk, time_budget,
        )
        for i in range(samples)
    ]
    counts = {c: 0 for c in _CLASSES}
    violations = 0
    budget_limited = 0
    cov_found = cov_unknown = 0
    nc_scaled: dict[int, list[float]] = {1: [], 2: [], 4: []}
    for r in recs:
        counts[r.klass] += 1
        if r.klass == "rational-point-found" and any(v == "no" for _, v in r.padic):
            violations += 1
        covered = all(v != "budget" for _, v in r.padic)
        if not covered:
            budget_limited += 1
        elif r.klass == "rational-point-found":
            cov_found += 1
        elif r.klass == "unknown":
            cov_unknown += 1
        if r.Nc is not None:
            for C in nc_scaled:
                nc_scaled[C].append(r.Nc * math.log(H) ** C / x_count**2)
    found = counts["rational-point-found"]
    unknown = counts["unknown"]
    ratio = found / (found + unknown) if found + unknown > 0 else None
    cov_total = cov_found + cov_unknown
    in_s = samples - counts["not-in-S"]
    positive = (found + unknown) / in_s if in_s > 0 else 0.0
    return HasseReport(
        samples=tuple(recs),
        counts=counts,
        ratio_lower_bound=ratio,
        ratio_full_coverage=cov_found / cov_total if cov_total > 0 else None,
        budget_limited=budget_limited,
        violations=violations,
        positive_fraction=positive,
        quantile_curves={C: _quantiles(v) for C, v in nc_scaled.items()},
        params={
            "H": H,
            "height_bound": height_bound,
            "prime_cutoff": prime_cutoff,
            "samples": samples,
            "seed": seed,
            "x_count": x_count,
            "m_dk": m_dk,
            "w_desk": w_desk,
            "k_desk": k_desk,
            "mc_samples": mc_samples,
            "B": B,
        },
    )


# ---------------------------------------------------------------------------
# Count-versus-model experiment.

@dataclass(frozen=True)
class DensityRecord:
    index: int
    coeffs: tuple[int, ...]
    Nc: int
    Nc_hat: float
    Nc_err: float
    within: bool


def density_instance_indices(
    cube: forms.CombinatorialCube, seed: int, count: int, scan_limit: int = 10**5
) -> list[int]:
    """First `count` cube indices whose form has nonzero edge coefficients."""
    out = []
    i = 0
    while len(out) < count:
        if i >= scan_limit:
            raise ResourceLimitError("not enough admissible instances in range")
        c = cube.sample(seed, i).coeffs
        if c[0] * c[-1] != 0:
            out.append(i)
        i += 1
    return out


def density_experiment(
    field: NumberField,
    H: int,
    x: int,
    samples: int,
    seed: int = 0,
    w_desk: int = DESK_W,
    k_desk: int = DESK_K,
    mc_samples: int = 100000,
    error_bars: float = 3.0,
    degree: Optional[int] = None,
) -> tuple[list[DensityRecord], RegionB]:
    """Exact counts against the localized model on sampled instances."""
    d = degree if degree is not None else field.degree
    cube = forms.CombinatorialCube(degree=d, side=H)
    norm = NormForm(field)
    probe = ChateletInstance(field=field, form=BinaryForm([1] * (d + 1)))
    region = RegionB(norm, 1, default_B(probe, x, H))
    region.histogram()
    profile = DensityProfile.draw(region, mc_samples, seed)
    W = model_W(w_desk, k_desk)
    records = []
    for idx in density_instance_indices(cube, seed, samples):
        form = cube.sample(seed, idx)
        inst = ChateletInstance(field=field, form=form)
        nc = count_Nc(inst, x, region)
        est, err = localized_Nc(inst, x, region, W, profile=profile)
        records.append(
            DensityRecord(
                index=idx,
                coeffs=form.coeffs,
                Nc=nc,
                Nc_hat=float(est),
                Nc_err=float(err),
                within=abs(nc - est) <= error_bars * err,
            )
        )
    return records, region
