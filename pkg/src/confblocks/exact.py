"""Exact rational arithmetic: sparse vectors, truncated q-series, Laurent jets,
graded bases and fraction-free linear algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Hashable, Iterable, Mapping, Sequence

Vector = dict  # sparse vector: basis label -> Fraction


class DimensionMismatch(ValueError):
    pass


class CutoffMismatch(ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and strings like "-3/4" into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# sparse vectors


def vadd(*vectors: Mapping) -> Vector:
    out: Vector = {}
    for v in vectors:
        for key, c in v.items():
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def vscale(c, v: Mapping) -> Vector:
    if not c:
        return {}
    return {key: c * x for key, x in v.items()}


def vaxpy(out: Vector, c, v: Mapping) -> None:
    """out += c * v, in place."""
    if not c:
        return
    for key, x in v.items():
        s = out.get(key, 0) + c * x
        if s:
            out[key] = s
        else:
            del out[key]


def vsub(a: Mapping, b: Mapping) -> Vector:
    out = dict(a)
    vaxpy(out, -1, b)
    return out


# ---------------------------------------------------------------------------
# rank


def _integer_rows(vectors: Sequence[Sequence]) -> list[list[int]]:
    rows = []
    for v in vectors:
        fr = [as_fraction(x) for x in v]
        m = lcm(*(x.denominator for x in fr)) if fr else 1
        rows.append([int(x * m) for x in fr])
    return rows


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, nrows):
            ar = a[r]
            f = ar[col]
            for c in range(col + 1, ncols):
                ar[c] = (p * ar[c] - f * a[rank][c]) // prev
            ar[col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def rank_of_span(vectors: Sequence[Sequence]) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise DimensionMismatch("vectors have different lengths")
    return bareiss_rank(_integer_rows(vectors))


def quotient_dim(ambient_dim: int, relations: Sequence[Sequence]) -> int:
    relations = list(relations)
    if any(len(r) != ambient_dim for r in relations):
        raise DimensionMismatch("relation length differs from ambient dimension")
    return ambient_dim - rank_of_span(relations)


class EchelonBasis:
    """Incrementally maintained reduced basis of a span of sparse vectors.

    Rows are kept with pivot coefficient 1. ``add`` reports whether the
    vector enlarged the span; ``reduce`` returns the remainder together with
    the combination of added vectors that was subtracted (when tracking).
    """

    def __init__(self, track: bool = False):
        self.rows: dict[Hashable, Vector] = {}
        self.order: list[Hashable] = []
        self.track = track
        self._combos: dict[Hashable, Vector] = {}
        self._count = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _sort_key(self, key):
        return key

    def reduce(self, v: Mapping) -> tuple[Vector, Vector]:
        rem = {k: as_fraction(x) for k, x in v.items() if x}
        combo: Vector = {}
        changed = True
        while changed:
            changed = False
            for key in [k for k in rem if k in self.rows]:
                c = rem.get(key)
                if not c:
                    continue
                vaxpy(rem, -c, self.rows[key])
                if self.track:
                    vaxpy(combo, c, self._combos[key])
                changed = True
        return rem, combo

    def add(self, v: Mapping, tag: Hashable | None = None) -> bool:
        rem, combo = self.reduce(v)
        idx = self._count
        self._count += 1
        if not rem:
            return False
        pivot = min(rem, key=self._sort_key)
        c = rem[pivot]
        row = {k: x / c for k, x in rem.items()}
        # keep the basis fully reduced in the pivot column
        for key, other in self.rows.items():
            f = other.get(pivot)
            if f:
                vaxpy(other, -f, row)
                if self.track:
                    vaxpy(self._combos[key], -f, self._combo_for(row, combo, idx, tag, c))
        if self.track:
            self._combos[pivot] = self._combo_for(row, combo, idx, tag, c)
        self.rows[pivot] = row
        self.order.append(pivot)
        return True

    def _combo_for(self, row, combo, idx, tag, c):
        base = {tag if tag is not None else idx: Fraction(1)}
        vaxpy(base, -1, combo)
        return vscale(1 / c, base)

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)[0]


# ---------------------------------------------------------------------------
# exact solve


def solve_linear(rows: Sequence[Mapping[int, Fraction]], rhs: Sequence, nvars: int):
    """Solve a sparse rational system; free variables are set to 0.

    Returns the solution list, or None when the system is inconsistent.
    """
    eb = EchelonBasis()
    aug = []
    for r, b in zip(rows, rhs):
        v = {k: as_fraction(x) for k, x in r.items() if x}
        if b:
            v[nvars] = as_fraction(b)
        aug.append(v)
    # pivot on variables before the augmented column
    for v in aug:
        eb.add(v)
    if nvars in eb.rows:
        return None
    x = [Fraction(0)] * nvars
    for pivot, row in eb.rows.items():
        x[pivot] = row.get(nvars, Fraction(0))
    return x


def nullspace(rows: Sequence[Mapping[int, Fraction]], nvars: int) -> list[list[Fraction]]:
    """Basis of {x : row . x = 0 for every row}, one vector per free variable."""
    eb = EchelonBasis()
    for r in rows:
        eb.add({k: as_fraction(x) for k, x in r.items() if x})
    free = [j for j in range(nvars) if j not in eb.rows]
    basis = []
    for f in free:
        x = [Fraction(0)] * nvars
        x[f] = Fraction(1)
        for pivot, row in eb.rows.items():
            x[pivot] = -row.get(f, Fraction(0))
        basis.append(x)
    return basis


# ---------------------------------------------------------------------------
# truncated q-series


@dataclass(frozen=True)
class QSeries:
    cutoff: int
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.coefficients[: self.cutoff + 1])
        coeffs = coeffs + (0,) * (self.cutoff + 1 - len(coeffs))
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_terms(cls, terms: Mapping[int, object], cutoff: int) -> "QSeries":
        coeffs = [0] * (cutoff + 1)
        for e, c in terms.items():
            if 0 <= e <= cutoff:
                coeffs[e] = c
        return cls(cutoff, tuple(coeffs))

    def _check(self, other: "QSeries"):
        if self.cutoff != other.cutoff:
            raise CutoffMismatch(f"cutoffs {self.cutoff} and {other.cutoff} differ")

    def __add__(self, other: "QSeries") -> "QSeries":
        self._check(other)
        return QSeries(self.cutoff, tuple(_plus(a, b) for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "QSeries":
        return QSeries(self.cutoff, tuple(_times(c, a) for a in self.coefficients))

    def __mul__(self, other: "QSeries") -> "QSeries":
        return qseries_mul(self, other)

    def __getitem__(self, i: int):
        return self.coefficients[i]

    def __str__(self) -> str:
        parts = []
        for e, c in enumerate(self.coefficients):
            if isinstance(c, (int, Fraction)) and c == 0:
                continue
            cs = format_fraction(c) if isinstance(c, (int, Fraction)) else str(c)
            parts.append(cs if e == 0 else f"{cs}*q^{e}")
        return " + ".join(parts) or "0"


def _plus(a, b):
    if isinstance(a, dict) or isinstance(b, dict):
        return vadd(a or {}, b or {})
    return a + b


def _times(c, a):
    if isinstance(a, dict):
        return vscale(c, a)
    return c * a


def qseries_mul(a: QSeries, b: QSeries) -> QSeries:
    a._check(b)
    out = [0] * (a.cutoff + 1)
    for i, x in enumerate(a.coefficients):
        if not x:
            continue
        for j in range(a.cutoff + 1 - i):
            y = b.coefficients[j]
            if y:
                out[i + j] += x * y
    return QSeries(a.cutoff, tuple(out))


# ---------------------------------------------------------------------------
# Laurent jets


@dataclass(frozen=True)
class LaurentJet:
    """Finitely many Laurent coefficients, known exactly below ``tail_order``."""

    var: str
    terms: Mapping[int, Fraction]
    tail_order: int

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            c = as_fraction(c)
            if e >= self.tail_order:
                raise ValueError(f"exponent {e} is not below tail order {self.tail_order}")
            if c:
                clean[int(e)] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def coeff(self, e: int) -> Fraction:
        if e >= self.tail_order:
            raise ValueError(f"coefficient of {self.var}^{e} is beyond the known tail")
        return self.terms.get(e, Fraction(0))

    def order(self) -> int:
        """Lowest exponent with non-zero coefficient (tail order if none known)."""
        return min(self.terms) if self.terms else self.tail_order

    def truncate(self, n: int) -> "LaurentJet":
        n = min(n, self.tail_order)
        return LaurentJet(self.var, {e: c for e, c in self.terms.items() if e < n}, n)

    def __add__(self, other: "LaurentJet") -> "LaurentJet":
        t = min(self.tail_order, other.tail_order)
        terms = dict(self.truncate(t).terms)
        for e, c in other.truncate(t).terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentJet(self.var, terms, t)

    def scale(self, c) -> "LaurentJet":
        return LaurentJet(self.var, {e: c * x for e, x in self.terms.items()}, self.tail_order)

    def __mul__(self, other: "LaurentJet") -> "LaurentJet":
        t = min(self.tail_order + other.order(), other.tail_order + self.order())
        terms: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                if e1 + e2 < t:
                    terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return LaurentJet(self.var, terms, t)

    def equal_mod(self, other: "LaurentJet", n: int) -> bool:
        """Agreement of all coefficients below exponent n."""
        if n > min(self.tail_order, other.tail_order):
            raise ValueError("comparison exceeds the known part of a jet")
        return self.truncate(n).terms == other.truncate(n).terms


# ---------------------------------------------------------------------------
# graded bases


@dataclass(frozen=True)
class GradedSpace:
    """Finite graded basis; ``basis[d]`` lists the labels of degree d."""

    basis: Mapping[Fraction, tuple]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ordered = {as_fraction(d): tuple(labels) for d, labels in sorted(self.basis.items())}
        object.__setattr__(self, "basis", ordered)
        idx = {}
        for d, labels in ordered.items():
            for lab in labels:
                if lab in idx:
                    raise ValueError(f"label {lab!r} appears twice")
                idx[lab] = d
        object.__setattr__(self, "_index", idx)

    @property
    def degrees(self) -> tuple:
        return tuple(self.basis)

    @property
    def dims(self) -> dict:
        return {d: len(labels) for d, labels in self.basis.items()}

    @property
    def dim(self) -> int:
        return len(self._index)

    def labels(self, max_degree=None) -> list:
        return [lab for d, labels in self.basis.items() if max_degree is None or d <= max_degree for lab in labels]

    def degree_of(self, label) -> Fraction:
        return self._index[label]

    def __contains__(self, label) -> bool:
        return label in self._index


def coordinates(v: Mapping, labels: Sequence) -> list[Fraction]:
    return [as_fraction(v.get(lab, 0)) for lab in labels]


def binomial(n, k: int) -> Fraction:
    """Generalised binomial coefficient C(n, k) for any rational n, integer k >= 0."""
    if k < 0:
        return Fraction(0)
    out = Fraction(1)
    for t in range(k):
        out = out * (n - t) / (t + 1)
    return out


def iter_sum(values: Iterable) -> Fraction:
    return sum(values, Fraction(0))
