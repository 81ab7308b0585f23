"""Zhu's Lie algebra on the punctured projective line and a truncated
estimate of three-point coinvariant dimensions for lattice modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .catalog import CatalogEntry
from .exact import EchelonBasis, as_fraction, binomial, nullspace, vaxpy
from .fock import FockModule, FockVOA, weight
from .nodal import INF, RationalSection
from .voa import ModeElement, TruncatedVOA, _l1_powers


class StrayPoleError(ValueError):
    pass


class InsufficientPointsError(ValueError):
    pass


@dataclass(frozen=True)
class ZhuLieElement:
    """Per marked point, the mode element Res_t Y[B, t] mu(t) (dt)^k, truncated
    to modes below ``order``; ``source`` records the pair (B, mu)."""

    per_point: tuple
    source: tuple
    order: int


def _l1_depth(B: Mapping, voa: TruncatedVOA) -> int:
    return len(_l1_powers(B, voa)) - 1


def zhu_element(B: Mapping, mu: RationalSection, points: Sequence, voa: TruncatedVOA, order: int = 4) -> ZhuLieElement:
    """phi(B (x) mu) with mu = f(z) (dz)^{1-k} for B of degree k.

    At a finite point the jet of f in s = z - p pairs coefficient s^m with
    B_[m]. Infinity needs the w = 1/z chart and is admitted only for
    quasi-primary B, for which the chart change acts by the differential's
    own transformation.
    """
    k = int(voa.vector_degree(B))
    if mu.k != 1 - k:
        raise ValueError(f"a degree-{k} vector pairs with a {1 - k}-differential")
    pts = [p if p == INF else as_fraction(p) for p in points]
    for p in mu.pole_points():
        if p not in pts:
            raise StrayPoleError(f"section has a pole at {p}, which is not marked")
    if INF in pts and _l1_depth(B, voa) > 0:
        raise ValueError("infinity is only supported for quasi-primary vectors")
    comps = []
    for p in pts:
        jet = mu.expand(p, order)
        comps.append(ModeElement({(a, m): c * cb for m, c in jet.terms.items() for a, cb in B.items()}))
    return ZhuLieElement(tuple(comps), (dict(B), mu), order)


# ---------------------------------------------------------------------------
# coinvariant estimates


@dataclass
class CoinvariantEstimate:
    cutoff: int
    ambient_dim: int
    relation_rank: int
    estimate: int
    stabilized: bool
    history: dict = field(default_factory=dict)  # cutoff -> estimate


def _section_basis(points: list, max_pole: int, decay: int) -> list[RationalSection]:
    """Functions with poles of order <= max_pole at the points and f = O(z^decay)."""
    if decay >= 0:
        out = [RationalSection(0, {p: {m: Fraction(1)}}, {}) for p in points for m in range(1, max_pole + 1)]
        out += [RationalSection(0, {}, {e: Fraction(1)}) for e in range(decay + 1)]
        return out
    unknowns = [(p, m) for p in points for m in range(1, max_pole + 1)]
    rows = []
    # coefficient of w^t in the expansion at infinity must vanish for t < -decay
    for t in range(1, -decay):
        row = {}
        for n, (p, m) in enumerate(unknowns):
            if m <= t:
                c = binomial(t - 1, t - m) * Fraction(p) ** (t - m)
                if c:
                    row[n] = c
        rows.append(row)
    out = []
    for vec in nullspace(rows, len(unknowns)):
        poles: dict = {}
        for (p, m), c in zip(unknowns, vec):
            if c:
                poles.setdefault(p, {})[m] = c
        out.append(RationalSection(0, poles, {}))
    return out


class _Estimator:
    def __init__(self, voa: FockVOA, labels, points, cutoff: int, field_degree: int, pole_bound: int | None):
        self.voa = voa
        self.points = [as_fraction(p) for p in points]
        self.D = cutoff
        self.modules = [FockModule(voa, lab, cutoff) for lab in labels]
        self.field_degree = field_degree
        self.max_pole = cutoff + 1 if pole_bound is None else pole_bound

    def ambient(self) -> dict:
        """Basis of F_D M^. grouped by total charge."""
        per = [[(m, int(mod.relative_degree(m))) for m in mod.basis(self.D)] for mod in self.modules]
        blocks: dict = {}
        for combo in product(*per):
            if sum(d for _, d in combo) <= self.D:
                vec = tuple(m for m, _ in combo)
                blocks.setdefault(sum(m[0] for m in vec), []).append(vec)
        return blocks

    def fields(self) -> list:
        """Basis labels B of V used for relations: h with f = 1 first so that
        the total-charge relations come before everything else."""
        labels = [a for a in self.voa.basis(self.field_degree) if a != self.voa.vacuum]
        labels.sort(key=lambda a: (a != self.voa.h, self.voa.degree(a), a))
        return labels

    def operator(self, B, section: RationalSection, i: int, u) -> tuple[dict, float]:
        """(image, max relative degree) of sum_m c_m B_(m) u at point i.

        Components beyond the window that cannot be shown to vanish make the
        maximal degree infinite, which disqualifies every relation using them.
        """
        mod = self.modules[i]
        kB = int(self.voa.degree(B))
        du = int(mod.relative_degree(u))
        top = du + kB - 1
        jet = section.expand(self.points[i], top + 1)
        image: dict = {}
        maxdeg = -1
        for m, c in jet.terms.items():
            t = du + kB - m - 1
            if t > self.D:
                # zero only if the target charge sector starts above degree t
                q = u[0] + B[0]
                if weight((q, ()), self.voa.norm) - mod.conformal_weight > t:
                    continue
                return {}, float("inf")
            part = mod.mode(B, m, {u: Fraction(1)})
            if part:
                vaxpy(image, c, part)
                maxdeg = max(maxdeg, t)
        return image, maxdeg

    def run(self) -> tuple[int, int]:
        blocks = self.ambient()
        ambient_dim = sum(len(v) for v in blocks.values())
        spans = {q: EchelonBasis() for q in blocks}
        dims = {q: len(v) for q, v in blocks.items()}
        cache: dict = {}
        for B in self.fields():
            kB = int(self.voa.degree(B))
            decay = 2 * kB - 2 - _l1_depth({B: Fraction(1)}, self.voa)
            sections = _section_basis(self.points, self.max_pole, decay)
            if B == self.voa.h:
                sections.sort(key=lambda s: (bool(s.poles), sorted(s.polynomial)))
            for s_idx, sec in enumerate(sections):
                for q_total, vecs in blocks.items():
                    target = q_total + B[0]
                    if target not in spans or spans[target].rank == dims[target]:
                        continue
                    span = spans[target]
                    for u in vecs:
                        degs = [int(self.modules[i].relative_degree(x)) for i, x in enumerate(u)]
                        rest = sum(degs)
                        rel: dict = {}
                        ok = True
                        for i, x in enumerate(u):
                            key = (B, s_idx, i, x)
                            hit = cache.get(key)
                            if hit is None:
                                hit = self.operator(B, sec, i, x)
                                cache[key] = hit
                            image, maxdeg = hit
                            if maxdeg + rest - degs[i] > self.D:
                                ok = False
                                break
                            for y, c in image.items():
                                tgt = u[:i] + (y,) + u[i + 1 :]
                                rel[tgt] = rel.get(tgt, 0) + c
                        if not ok:
                            continue
                        rel = {t: c for t, c in rel.items() if c}
                        if rel:
                            span.add(rel)
                            if span.rank == dims[target]:
                                break
        relation_rank = sum(s.rank for s in spans.values())
        return ambient_dim, relation_rank


def truncated_coinvariant_dim(
    labels: Sequence,
    points: Sequence,
    voa: FockVOA,
    cutoff: int,
    field_degree: int | None = None,
    pole_bound: int | None = None,
) -> CoinvariantEstimate:
    """Dimension of F_D M^. modulo the in-window relations phi(B (x) f) u.

    Computed at D and D - 1; the estimate is flagged stabilized when equal.
    """
    if len(points) < 3 or len(points) != len(labels):
        raise InsufficientPointsError("need at least three marked points, one per module")
    if any(p == INF for p in points):
        raise ValueError("the estimator uses finite marked points")
    if len(set(as_fraction(p) for p in points)) != len(points):
        raise ValueError("marked points must be distinct")
    if field_degree is None:
        field_degree = max(1, voa.k or 1)
    history = {}
    result = None
    for D in ([cutoff - 1] if cutoff > 0 else []) + [cutoff]:
        est = _Estimator(voa, labels, points, D, field_degree, pole_bound)
        amb, rel = est.run()
        history[D] = amb - rel
        result = (amb, rel)
    amb, rel = result
    stabilized = cutoff > 0 and history[cutoff] == history[cutoff - 1]
    return CoinvariantEstimate(cutoff, amb, rel, amb - rel, stabilized, history)


@dataclass
class OracleReport:
    rows: list  # (triple, N, estimate, stabilized)

    @property
    def mismatches(self) -> list:
        return [r for r in self.rows if r[1] != r[2] or not r[3]]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def oracle_vs_fusion(entry: CatalogEntry, max_cutoff: int, points=(0, 1, -1), ring=None) -> OracleReport:
    """Compare the stabilized estimate with N for every ordered label triple.

    ``ring`` overrides the catalog's fusion data (used for negative controls).
    """
    if entry.family != "lattice":
        raise ValueError("the oracle needs concrete lattice modules")
    (k,) = entry.parameters
    ring = ring or entry.ring
    voa = FockVOA(max(max_cutoff, k), k=k)
    rows = []
    for triple in product(ring.labels, repeat=3):
        est = truncated_coinvariant_dim([int(x) for x in triple], points, voa, max_cutoff)
        rows.append((triple, ring.N(*triple), est.estimate, est.stabilized))
    return OracleReport(rows)
