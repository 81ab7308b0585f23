"""Rank-one Heisenberg and lattice vertex algebras on Fock spaces.

A Fock basis vector is a pair ``(p, partition)`` meaning
h_{-n_1} ... h_{-n_r} v_p, where p = (lambda, h) is the charge measured
against the Heisenberg generator h and the partition is weakly decreasing.
All structure constants are rational once h is normalised by (h, h) = N:
for the lattice sqrt(2k)Z we take h to be the lattice generator, so N = 2k
and charges are integers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .exact import GradedSpace, QSeries, Vector, binomial, vaxpy
from .voa import TruncatedModule, TruncatedVOA

State = tuple  # (charge, partition)


@dataclass(frozen=True)
class EvenLattice:
    """Rank-one even lattice Z*alpha with (alpha, alpha) = gram."""

    gram: int

    def __post_init__(self):
        if self.gram <= 0 or self.gram % 2:
            raise ValueError("lattice must be positive definite and even")

    @property
    def rank(self) -> int:
        return 1

    @property
    def discriminant(self) -> int:
        return self.gram


def weight(state: State, norm) -> Fraction:
    p, part = state
    return Fraction(p) ** 2 / (2 * norm) + sum(part)


def partitions(n: int, max_part: int | None = None):
    """Weakly decreasing tuples of positive integers summing to n."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def _insert(part: tuple, extra: tuple) -> tuple:
    return tuple(sorted(part + extra, reverse=True))


def _remove_one(part: tuple, n: int) -> tuple:
    lst = list(part)
    lst.remove(n)
    return tuple(lst)


# ---------------------------------------------------------------------------
# Heisenberg modes


def heisenberg_mode(n: int, v: Vector, norm=1) -> Vector:
    """h_n with [h_m, h_n] = m N delta_{m+n,0} and h_0 v_p = p v_p."""
    out: Vector = {}
    for (p, part), c in v.items():
        if n == 0:
            if p:
                vaxpy(out, c * p, {(p, part): 1})
        elif n < 0:
            vaxpy(out, c, {(p, _insert(part, (-n,))): 1})
        else:
            mult = part.count(n)
            if mult:
                vaxpy(out, c * n * mult * Fraction(norm), {(p, _remove_one(part, n)): 1})
    return out


def _annihilation_field(m: int, v: Vector, norm) -> Vector:
    """Annihilation half of the field d^(m) h(z) / m!, summed over modes n >= 0."""
    out: Vector = {}
    sign = -1 if m % 2 else 1
    for (p, part), c in v.items():
        if p:
            vaxpy(out, c * sign * p, {(p, part): 1})
        for n, mult in Counter(part).items():
            coef = sign * binomial(n + m, m) * n * mult * Fraction(norm)
            vaxpy(out, c * coef, {(p, _remove_one(part, n)): 1})
    return out


def _exp_annihilation(beta, v: Vector, norm) -> Vector:
    """exp(-sum_{n>0} beta_n / n) with beta_n = (b/N) h_n."""
    scale = Fraction(beta) / norm
    out = dict(v)
    term = dict(v)
    k = 0
    while term:
        k += 1
        nxt: Vector = {}
        for (p, part), c in term.items():
            for n, mult in Counter(part).items():
                coef = -scale / n * n * mult * Fraction(norm) / k
                vaxpy(nxt, c * coef, {(p, _remove_one(part, n)): 1})
        term = nxt
        vaxpy(out, 1, term)
    return out


@lru_cache(maxsize=None)
def _creation_polynomial(ms: tuple, beta_over_norm: Fraction, degree: int) -> tuple:
    """Degree-`degree` part of prod_j C_{m_j} * exp(sum_{n>0} beta_{-n}/n) as monomials.

    C_m = sum_{n >= m+1} C(n-1, m) h_{-n} is the creation half of d^(m) h / m!.
    Monomials are partitions listing the creation modes.
    """
    poly: dict = {(): Fraction(1)}
    for m in ms:
        nxt: dict = {}
        for mono, c in poly.items():
            room = degree - sum(mono)
            for n in range(m + 1, room + 1):
                key = _insert(mono, (n,))
                nxt[key] = nxt.get(key, 0) + c * binomial(n - 1, m)
        poly = nxt
    if beta_over_norm:
        # exp(Y) with Y = b/N sum h_{-n}/n, expanded up to the remaining degree
        expo: dict = {(): Fraction(1)}
        term: dict = {(): Fraction(1)}
        k = 0
        while term:
            k += 1
            nxt = {}
            for mono, c in term.items():
                room = degree - sum(mono)
                for n in range(1, room + 1):
                    key = _insert(mono, (n,))
                    nxt[key] = nxt.get(key, 0) + c * beta_over_norm / n / k
            term = {a: b for a, b in nxt.items() if b}
            for a, b in term.items():
                expo[a] = expo.get(a, 0) + b
        prod: dict = {}
        for m1, c1 in poly.items():
            for m2, c2 in expo.items():
                if sum(m1) + sum(m2) <= degree:
                    key = _insert(m1, m2)
                    prod[key] = prod.get(key, 0) + c1 * c2
        poly = prod
    return tuple((mono, c) for mono, c in poly.items() if c and sum(mono) == degree)


def vertex_mode(u: State, i: int, v: Vector, norm) -> Vector:
    """u_(i) v for u = h_{-n_1}...h_{-n_r} e^beta, via the normally ordered
    exponential formula  :prod d^(n_j - 1) h(z)  Y(e^beta, z):  with trivial cocycle.

    Each summand of the expansion shifts degree in lockstep with its power of
    z, so the coefficient of z^{-i-1} is the part of the expansion landing in
    degree wt(u) + wt(v) - i - 1.
    """
    b, upart = u
    ms = [n - 1 for n in upart]
    r = len(ms)
    wu = weight(u, norm)
    bn = Fraction(b) / norm
    out: Vector = {}
    for (p, vpart), cv in v.items():
        target = wu + weight((p, vpart), norm) - i - 1
        if target < weight((p + b, ()), norm):
            continue
        base = {(p, vpart): cv}
        for size in range(r + 1):
            for S in combinations(range(r), size):
                w = base
                for j in range(r):
                    if j not in S:
                        w = _annihilation_field(ms[j], w, norm)
                        if not w:
                            break
                if not w:
                    continue
                if b:
                    w = _exp_annihilation(b, w, norm)
                    w = {(q + b, part): c for (q, part), c in w.items()}
                cms = tuple(sorted(ms[j] for j in S))
                for (q, part), c in w.items():
                    room = target - weight((q, part), norm)
                    if room < 0:
                        continue
                    assert room.denominator == 1
                    for mono, cm in _creation_polynomial(cms, bn, int(room)):
                        vaxpy(out, c * cm, {(q, _insert(part, mono)): 1})
    return out


# ---------------------------------------------------------------------------
# truncated instances


def _fock_space(charges, norm, max_weight) -> GradedSpace:
    basis: dict = {}
    for p in charges:
        w0 = weight((p, ()), norm)
        n = 0
        while w0 + n <= max_weight:
            for part in partitions(n):
                basis.setdefault(w0 + n, []).append((p, part))
            n += 1
    for d in basis:
        basis[d].sort(key=lambda s: (len(s[1]), s[1], abs(s[0]), s[0]))
    return GradedSpace(basis)


class FockVOA(TruncatedVOA):
    """V_L for L = sqrt(2k) Z (or the Heisenberg VOA when ``k`` is None).

    ``norm`` is (h, h); charges of V run over norm * Z for a lattice.
    """

    def __init__(self, max_degree: int, k: int | None = None, norm=None):
        super().__init__(max_degree)
        self.k = k
        if k is None:
            self.norm = Fraction(1 if norm is None else norm)
            charges = [0]
        else:
            self.lattice = EvenLattice(2 * k)
            self.norm = Fraction(2 * k)
            charges = []
            m = 0
            while weight((2 * k * m, ()), self.norm) <= max_degree:
                charges += [2 * k * m] + ([-2 * k * m] if m else [])
                m += 1
        self.space = _fock_space(charges, self.norm, max_degree)
        self.vacuum = (0, ())
        self.h = (0, (1,))
        self.omega = {(0, (1, 1)): 1 / (2 * self.norm)}
        self.central_charge = Fraction(1)

    def _basis_mode(self, a, i: int, b) -> Vector:
        return vertex_mode(a, i, {b: Fraction(1)}, self.norm)

    def exp_state(self, m: int) -> State:
        """e^{m alpha} as a basis label."""
        return (2 * self.k * m, ())

    def describe(self, label) -> str:
        p, part = label
        ops = "".join(f"h(-{n})" for n in part)
        return f"{ops}|{p}>" if ops else f"|{p}>"


class FockModule(TruncatedModule):
    """V_{L + lambda} (coset x mod 2k) for a lattice VOA, or pi_p for Heisenberg."""

    def __init__(self, voa: FockVOA, label, max_degree: int):
        super().__init__(voa, max_degree)
        norm = voa.norm
        if voa.k is None:
            charges = [Fraction(label)]
        else:
            mod = 2 * voa.k
            x = int(label) % mod
            reps = sorted({x, x - mod}, key=lambda p: (abs(p), p))
            lowest = min(weight((p, ()), norm) for p in reps)
            charges = []
            for t in range(0, max_degree + 2):
                for p in (x + mod * t, x - mod * (t + 1)):
                    if weight((p, ()), norm) <= lowest + max_degree and p not in charges:
                        charges.append(p)
        self.label = label
        wts = [weight((p, ()), norm) for p in charges]
        self.conformal_weight = min(wts)
        self.space = _fock_space(charges, norm, self.conformal_weight + max_degree)

    def _basis_mode(self, a, i: int, m) -> Vector:
        return vertex_mode(a, i, {m: Fraction(1)}, self.voa.norm)

    def lowest_space(self) -> list:
        return self.basis(0)


def graded_dimension(k: int | None, label, cutoff: int) -> QSeries:
    """Character of a Fock or lattice module, counted from its lowest degree."""
    voa = FockVOA(0, k=k)
    mod = FockModule(voa, label, cutoff)
    counts = [0] * (cutoff + 1)
    for lab in mod.space.labels():
        counts[int(mod.relative_degree(lab))] += 1
    return QSeries(cutoff, tuple(counts))


def lowest_weight(k: int, label) -> Fraction:
    """Conformal weight of the lattice module, read off from the implemented L_0."""
    voa = FockVOA(2, k=k)
    mod = FockModule(voa, label, 0)
    v = mod.lowest_space()[0]
    image = mod.L(0, {v: Fraction(1)})
    return image.get(v, Fraction(0))
