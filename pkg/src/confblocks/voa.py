"""Truncated vertex operator algebras and modules.

Concrete families subclass :class:`TruncatedVOA` / :class:`TruncatedModule`
and supply ``_basis_mode``; everything else here (mode elements of the
ancillary Lie algebra, the bracket, the gluing actions, the Zhu product and
the contragredient action) is generic.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Hashable, Iterable, Mapping

from .exact import EchelonBasis, GradedSpace, Vector, binomial, vaxpy, vscale


class TruncationError(ArithmeticError):
    """A requested value lies outside the truncation window."""


# ---------------------------------------------------------------------------
# mode elements A_[i] of the ancillary Lie algebra


class ModeElement:
    """Finite combination sum c * A_[i] with A a basis label of V."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, object] | Iterable[tuple] = ()):
        acc: dict[tuple, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else (((a, i), c) for a, i, c in terms)
        for (a, i), c in items:
            s = acc.get((a, int(i)), 0) + Fraction(c)
            if s:
                acc[(a, int(i))] = s
            else:
                acc.pop((a, int(i)), None)
        self.terms = acc

    @classmethod
    def single(cls, label, i: int, coeff=1) -> "ModeElement":
        return cls({(label, i): coeff})

    @classmethod
    def from_vector(cls, vec: Mapping, i: int) -> "ModeElement":
        return cls({(a, i): c for a, c in vec.items()})

    def __add__(self, other: "ModeElement") -> "ModeElement":
        t = dict(self.terms)
        vaxpy(t, 1, other.terms)
        return ModeElement(t)

    def __sub__(self, other: "ModeElement") -> "ModeElement":
        return self + other.scale(-1)

    def scale(self, c) -> "ModeElement":
        return ModeElement(vscale(Fraction(c), self.terms))

    def __eq__(self, other) -> bool:
        return isinstance(other, ModeElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        inner = " + ".join(f"{c}*{a}[{i}]" for (a, i), c in sorted(self.terms.items(), key=repr))
        return f"ModeElement({inner or '0'})"

    def degrees(self, voa: "TruncatedVOA") -> set:
        return {voa.degree(a) - i - 1 for a, i in self.terms}

    def degree_part(self, voa: "TruncatedVOA", d) -> "ModeElement":
        return ModeElement({(a, i): c for (a, i), c in self.terms.items() if voa.degree(a) - i - 1 == d})


# ---------------------------------------------------------------------------
# truncated algebras and modules


class TruncatedVOA:
    """Graded V_{<=D} with vacuum, conformal vector and mode action.

    Subclasses set ``space``, ``vacuum``, ``omega``, ``central_charge`` and
    implement ``_basis_mode(a, i, b)`` returning A_(i)B for basis labels.
    """

    space: GradedSpace
    vacuum: Hashable
    omega: Vector
    central_charge: Fraction

    def __init__(self, max_degree: int):
        self.max_degree = max_degree
        self._mode_cache: dict = {}
        self._decomp_cache: dict = {}
        self._translation_basis: dict = {}

    # -- basics
    def degree(self, label) -> Fraction:
        return self.space.degree_of(label)

    def vector_degree(self, v: Mapping) -> Fraction:
        degs = {self.degree(a) for a in v}
        if len(degs) > 1:
            raise ValueError("vector is not homogeneous")
        return degs.pop() if degs else Fraction(0)

    def basis(self, max_degree=None) -> list:
        return self.space.labels(max_degree)

    def _basis_mode(self, a, i: int, b) -> Vector:  # pragma: no cover - abstract
        raise NotImplementedError

    def mode(self, a, i: int, v: Mapping) -> Vector:
        """A_(i) v for a basis label A; raises TruncationError above the window."""
        out: Vector = {}
        da = self.degree(a)
        for b, c in v.items():
            target = da - i - 1 + self.degree(b)
            if target < 0:
                continue
            if target > self.max_degree:
                raise TruncationError(f"{a}_({i}) on {b} has degree {target} > {self.max_degree}")
            key = (a, i, b)
            res = self._mode_cache.get(key)
            if res is None:
                res = self._basis_mode(a, i, b)
                self._mode_cache[key] = res
            vaxpy(out, c, res)
        return out

    def vmode(self, A: Mapping, i: int, v: Mapping) -> Vector:
        """A_(i) v for an arbitrary vector A."""
        out: Vector = {}
        for a, c in A.items():
            vaxpy(out, c, self.mode(a, i, v))
        return out

    def L(self, n: int, v: Mapping) -> Vector:
        return self.vmode(self.omega, n + 1, v)

    # -- normal form modulo the translation image
    def _decompose(self, label) -> tuple[Vector, Vector]:
        """Write a basis vector as c + L_{-1} a with c on a fixed complement."""
        hit = self._decomp_cache.get(label)
        if hit is not None:
            return hit
        d = self.degree(label)
        if d == 0:
            res = ({label: Fraction(1)}, {})
        else:
            eb = self._translation_image(d)
            rem, combo = eb.reduce({label: Fraction(1)})
            res = (rem, combo)
        self._decomp_cache[label] = res
        return res

    def _translation_image(self, d) -> EchelonBasis:
        eb = self._translation_basis.get(d)
        if eb is None:
            eb = EchelonBasis(track=True)
            for f in self.space.basis.get(d - 1, ()):
                if f == self.vacuum:
                    continue
                eb.add(self.L(-1, {f: Fraction(1)}), tag=f)
            self._translation_basis[d] = eb
        return eb

    def normal_form(self, x: ModeElement) -> ModeElement:
        """Canonical representative of x modulo (L_{-1}A)_[i] + i A_[i-1]."""
        out: dict = {}
        work = dict(x.terms)
        while work:
            (a, i), c = work.popitem()
            if self.degree(a) == 0:
                if i == -1:
                    vaxpy(out, c, {(a, i): 1})
                continue
            comp, pre = self._decompose(a)
            for b, cb in comp.items():
                vaxpy(out, c * cb, {(b, i): 1})
            if i and pre:
                for b, cb in pre.items():
                    vaxpy(work, -i * c * cb, {(b, i - 1): 1})
        return ModeElement(out)


class TruncatedModule:
    """Graded module M_{<=D} over a TruncatedVOA.

    ``space`` carries absolute L_0-degrees, so the lowest degree is the
    conformal weight.
    """

    voa: TruncatedVOA
    space: GradedSpace
    conformal_weight: Fraction

    def __init__(self, voa: TruncatedVOA, max_degree: int):
        self.voa = voa
        self.max_degree = max_degree
        self._mode_cache: dict = {}

    def relative_degree(self, label) -> Fraction:
        return self.space.degree_of(label) - self.conformal_weight

    def basis(self, max_relative_degree=None) -> list:
        if max_relative_degree is None:
            return self.space.labels()
        return self.space.labels(self.conformal_weight + max_relative_degree)

    def _basis_mode(self, a, i: int, m) -> Vector:  # pragma: no cover - abstract
        raise NotImplementedError

    def mode(self, a, i: int, v: Mapping) -> Vector:
        out: Vector = {}
        da = self.voa.degree(a)
        for m, c in v.items():
            target = da - i - 1 + self.relative_degree(m)
            if target < 0:
                continue
            if target > self.max_degree:
                raise TruncationError(f"{a}_({i}) on {m} leaves the module window")
            key = (a, i, m)
            res = self._mode_cache.get(key)
            if res is None:
                res = self._basis_mode(a, i, m)
                self._mode_cache[key] = res
            vaxpy(out, c, res)
        return out

    def vmode(self, A: Mapping, i: int, v: Mapping) -> Vector:
        out: Vector = {}
        for a, c in A.items():
            vaxpy(out, c, self.mode(a, i, v))
        return out

    def act(self, x: ModeElement, v: Mapping) -> Vector:
        out: Vector = {}
        for (a, i), c in x.terms.items():
            vaxpy(out, c, self.mode(a, i, v))
        return out

    def L(self, n: int, v: Mapping) -> Vector:
        return self.vmode(self.voa.omega, n + 1, v)


# ---------------------------------------------------------------------------
# generic operations


def lie_bracket(x: ModeElement, y: ModeElement, voa: TruncatedVOA) -> ModeElement:
    """[A_[i], B_[j]] = sum_k C(i,k) (A_(k)B)_[i+j-k], in normal form."""
    out: dict = {}
    for (a, i), ca in x.terms.items():
        for (b, j), cb in y.terms.items():
            top = int(voa.degree(a) + voa.degree(b)) - 1
            for k in range(0, top + 1):
                coef = binomial(i, k)
                if not coef:
                    continue
                ab = voa.mode(a, k, {b: Fraction(1)})
                for lab, c in ab.items():
                    vaxpy(out, ca * cb * coef * c, {(lab, i + j - k): 1})
    return voa.normal_form(ModeElement(out))


def _l1_powers(A: Mapping, voa: TruncatedVOA) -> list[Vector]:
    """[A, L1 A, L1^2 A, ...] until zero."""
    out = []
    cur = dict(A)
    while cur:
        out.append(cur)
        cur = voa.L(1, cur)
    return out


def gamma_action(A: Mapping, voa: TruncatedVOA) -> Vector:
    """e^{L_1} (-1)^{L_0} applied to A."""
    out: Vector = {}
    by_degree: dict = {}
    for a, c in A.items():
        by_degree.setdefault(voa.degree(a), {})[a] = c
    for k, part in by_degree.items():
        sign = -1 if int(k) % 2 else 1
        for n, term in enumerate(_l1_powers(part, voa)):
            vaxpy(out, Fraction(sign, factorial(n)), term)
    return out


def theta_involution(x: ModeElement, voa: TruncatedVOA) -> ModeElement:
    """theta(A_[j]) = (-1)^(k-1) sum_i (1/i!) (L_1^i A)_[2k-j-i-2], A in V_k."""
    out: dict = {}
    for (a, j), c in x.terms.items():
        k = int(voa.degree(a))
        sign = 1 if (k - 1) % 2 == 0 else -1
        for n, term in enumerate(_l1_powers({a: Fraction(1)}, voa)):
            idx = 2 * k - j - n - 2
            f = Fraction(sign, factorial(n)) * c
            for b, cb in term.items():
                vaxpy(out, f * cb, {(b, idx): 1})
    return ModeElement(out)


def zhu_product(A: Mapping, B: Mapping, voa: TruncatedVOA) -> Vector:
    """Res_z (1+z)^{deg A} / z  Y(A,z) B."""
    k = int(voa.vector_degree(A))
    out: Vector = {}
    for j in range(k + 1):
        vaxpy(out, binomial(k, j), voa.vmode(A, j - 1, B))
    return out


def zhu_O_generator(a, b, voa: TruncatedVOA) -> Vector:
    """Res_z (1+z)^{deg A} / z^2  Y(A,z) B for basis labels a, b."""
    k = int(voa.degree(a))
    out: Vector = {}
    for j in range(k + 1):
        vaxpy(out, binomial(k, j), voa.mode(a, j - 2, {b: Fraction(1)}))
    return out


def zhu_O_span(voa: TruncatedVOA, cutoff: int) -> EchelonBasis:
    """Span of the O(V)-generators lying entirely in V_{<=cutoff}."""
    if cutoff > voa.max_degree:
        raise TruncationError(f"cutoff {cutoff} exceeds the window {voa.max_degree}")
    cache = getattr(voa, "_zhu_O_cache", None)
    if cache is None:
        cache = voa._zhu_O_cache = {}
    if cutoff in cache:
        return cache[cutoff]
    eb = EchelonBasis()
    labels = voa.basis(cutoff)
    for a in labels:
        for b in labels:
            if voa.degree(a) + voa.degree(b) + 1 > cutoff:
                continue
            eb.add(zhu_O_generator(a, b, voa))
    cache[cutoff] = eb
    return eb


def zhu_O_membership(B: Mapping, voa: TruncatedVOA, cutoff: int) -> bool:
    return zhu_O_span(voa, cutoff).contains(B)


def contragredient_mode(A: Mapping, n: int, psi: Mapping, module: TruncatedModule) -> Vector:
    """A_[n] acting on the graded dual: a functional given by its values on basis vectors.

    <A_(n) psi, m> = (-1)^k sum_i (1/i!) <psi, (L_1^i A)_(2k-i-n-2) m>, A in V_k.
    """
    voa = module.voa
    k = int(voa.vector_degree(A))
    sign = -1 if k % 2 else 1
    if not psi:
        return {}
    dpsi = {module.relative_degree(m) for m in psi}
    if len(dpsi) != 1:
        raise ValueError("functional must be homogeneous")
    target = dpsi.pop() + k - n - 1
    if target < 0:
        return {}
    if target > module.max_degree:
        raise TruncationError("contragredient mode leaves the window")
    powers = _l1_powers(A, voa)
    out: Vector = {}
    for m in module.basis(target):
        if module.relative_degree(m) != target:
            continue
        val = Fraction(0)
        for i, term in enumerate(powers):
            image = module.vmode(term, 2 * k - i - n - 2, {m: Fraction(1)})
            val += Fraction(1, factorial(i)) * sum((psi.get(x, 0) * c for x, c in image.items()), Fraction(0))
        if val:
            out[m] = sign * val
    return out


def contragredient_matrix(A: Mapping, n: int, module: TruncatedModule, source_degree) -> dict:
    """All of A_[n] on the dual of one graded piece at once: maps each basis
    label e' of that piece to the functional A_[n] e'^*."""
    voa = module.voa
    k = int(voa.vector_degree(A))
    sign = -1 if k % 2 else 1
    target = source_degree + k - n - 1
    if target < 0:
        return {}
    if target > module.max_degree:
        raise TruncationError("contragredient mode leaves the window")
    powers = _l1_powers(A, voa)
    out: dict = {}
    for m in module.basis(target):
        if module.relative_degree(m) != target:
            continue
        image: Vector = {}
        for i, term in enumerate(powers):
            vaxpy(image, Fraction(sign, factorial(i)), module.vmode(term, 2 * k - i - n - 2, {m: Fraction(1)}))
        for ep, c in image.items():
            out.setdefault(ep, {})[m] = c
    return out


def contragredient_action(A: Mapping, psi: Mapping, module: TruncatedModule) -> Vector:
    """o(A) on the dual of the lowest-degree space."""
    k = int(module.voa.vector_degree(A))
    return contragredient_mode(A, k - 1, psi, module)
