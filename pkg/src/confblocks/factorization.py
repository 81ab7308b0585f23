"""Ranks of conformal-block bundles from fusion data.

Ranks satisfy a recursion over nodal degenerations: cutting a non-separating
node inserts a dual pair (W, W'), cutting a separating node splits the
insertions and sums over the label on the node.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .catalog import FusionRing


class UnstableQueryError(ValueError):
    pass


@dataclass(frozen=True)
class RankQuery:
    genus: int
    insertions: tuple
    ring: FusionRing


class RankEngine:
    """Memoised rank recursion for one fusion ring.

    The memo table is the only mutable state; its writes are idempotent, so
    concurrent use from several threads yields the same values.
    """

    def __init__(self, ring: FusionRing, memoize: bool = True):
        self.ring = ring
        self.memoize = memoize
        self._order = {lab: n for n, lab in enumerate(ring.labels)}
        self._memo: dict = {}

    def _key(self, genus: int, insertions) -> tuple:
        ins = tuple(sorted((self.ring.resolve(x) for x in insertions), key=self._order.__getitem__))
        return genus, ins

    def rank(self, genus: int, insertions: Sequence[str] = ()) -> int:
        if genus < 0:
            raise UnstableQueryError("genus must be non-negative")
        g, ins = self._key(genus, insertions)
        return self._rank(g, ins)

    def _rank(self, g: int, ins: tuple) -> int:
        if self.memoize:
            hit = self._memo.get((g, ins))
            if hit is not None:
                return hit
        value = self._compute(g, ins)
        if self.memoize:
            self._memo[(g, ins)] = value
        return value

    def _sorted(self, labels) -> tuple:
        return tuple(sorted(labels, key=self._order.__getitem__))

    def _compute(self, g: int, ins: tuple) -> int:
        ring = self.ring
        V = ring.vacuum
        n = len(ins)
        if 2 * g - 2 + n <= 0:
            # unstable: add a vacuum insertion at an auxiliary point
            return self._rank(g, self._sorted(ins + (V,)))
        if g == 0 and n == 3:
            return ring.N(*ins)
        if g == 0:
            a, b, rest = ins[0], ins[1], ins[2:]
            total = 0
            for w in ring.labels:
                left = ring.N(a, b, w)
                if left:
                    total += left * self._rank(0, self._sorted(rest + (ring.dual[w],)))
            return total
        return sum(self._rank(g - 1, self._sorted(ins + (w, ring.dual[w]))) for w in ring.labels)


_ENGINES: dict = {}


def engine_for(ring: FusionRing) -> RankEngine:
    hit = _ENGINES.get(id(ring))
    if hit is None or hit[0] is not ring:
        hit = (ring, RankEngine(ring))
        _ENGINES[id(ring)] = hit
    return hit[1]


def rank(query: RankQuery) -> int:
    return engine_for(query.ring).rank(query.genus, query.insertions)


# ---------------------------------------------------------------------------
# stable graphs


@dataclass(frozen=True)
class StableGraph:
    """Dual graph: vertex genera, edges as vertex pairs (loops allowed), and
    legs as (vertex, label)."""

    vertices: tuple
    edges: tuple = ()
    legs: tuple = ()

    def valence(self, v: int) -> int:
        val = sum((a == v) + (b == v) for a, b in self.edges)
        return val + sum(1 for w, _ in self.legs if w == v)

    def is_stable(self) -> bool:
        return all(2 * g - 2 + self.valence(v) > 0 for v, g in enumerate(self.vertices))

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen, stack = {0}, [0]
        while stack:
            v = stack.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == len(self.vertices)

    @property
    def genus(self) -> int:
        return len(self.edges) - len(self.vertices) + 1 + sum(self.vertices)

    def canonical(self) -> tuple:
        """Isomorphism-invariant key; legs are distinguished by position."""
        best = None
        n = len(self.vertices)
        for perm in permutations(range(n)):
            verts = tuple(self.vertices[perm.index(v)] for v in range(n))
            edges = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in self.edges))
            legs = tuple(perm[v] for v, _ in self.legs)
            key = (verts, edges, legs)
            if best is None or key < best:
                best = key
        return best


class UnstableVertexError(ValueError):
    pass


def rank_via_graph(graph: StableGraph, ring: FusionRing, engine: RankEngine | None = None) -> int:
    """Sum over edge labellings of the product of vertex ranks.

    An edge (u, v) labelled W contributes W at u and W' at v. Vertices are
    multiplied in as soon as all their half-edges carry labels, and branches
    with a vanishing factor are abandoned.
    """
    if not graph.is_stable():
        raise UnstableVertexError("graph has an unstable vertex")
    eng = engine or engine_for(ring)
    nv = len(graph.vertices)
    base = [[ring.resolve(lab) for w, lab in graph.legs if w == v] for v in range(nv)]
    # order edges so vertices close early
    order, placed, remaining = [], set(), list(range(len(graph.edges)))
    while remaining:
        remaining.sort(key=lambda e: -((graph.edges[e][0] in placed) + (graph.edges[e][1] in placed)))
        e = remaining.pop(0)
        order.append(e)
        placed.update(graph.edges[e])
    last_edge = {}
    for pos, e in enumerate(order):
        for v in graph.edges[e]:
            last_edge[v] = pos
    closes: dict = {}
    for v in range(nv):
        closes.setdefault(last_edge.get(v, -1), []).append(v)

    def vertex_value(v, slots):
        return eng.rank(graph.vertices[v], base[v] + slots[v])

    slots = [[] for _ in range(nv)]
    factor = 1
    for v in closes.get(-1, []):
        factor *= vertex_value(v, slots)
    if not factor:
        return 0

    def walk(pos: int) -> int:
        if pos == len(order):
            return 1
        a, b = graph.edges[order[pos]]
        total = 0
        for w in ring.labels:
            slots[a].append(w)
            slots[b].append(ring.dual[w])
            f = 1
            for v in closes.get(pos, []):
                f *= vertex_value(v, slots)
                if not f:
                    break
            if f:
                total += f * walk(pos + 1)
            slots[b].pop()
            slots[a].pop()
        return total

    return factor * walk(0)


def trivalent_closed_graph(genus: int, vacuum: str = "V") -> StableGraph:
    """A fixed trivalent genus-0-vertex graph of the given genus without legs
    (for genus <= 1 a vacuum leg is added)."""
    if genus == 0:
        return StableGraph((0,), (), ((0, vacuum),) * 3)
    if genus == 1:
        return StableGraph((0,), ((0, 0),), ((0, vacuum),))
    n = 2 * genus - 2
    edges = [(0, 0), (n - 1, n - 1)]
    edges += [(v, v + 1) for v in range(n - 1)]
    edges += [(v, v + 1) for v in range(1, n - 2, 2)]
    return StableGraph(tuple([0] * n), tuple(edges), ())


# ---------------------------------------------------------------------------
# degenerations


@dataclass
class _MutableGraph:
    vertices: list
    ends: list  # per edge: [vertex, vertex]
    legs: list  # per leg: [vertex, label]

    def attachments(self, v: int) -> list:
        out = [("leg", i) for i, (w, _) in enumerate(self.legs) if w == v]
        for e, (a, b) in enumerate(self.ends):
            if a == v:
                out.append(("edge", e, 0))
            if b == v:
                out.append(("edge", e, 1))
        return out

    def freeze(self) -> StableGraph:
        return StableGraph(tuple(self.vertices), tuple(tuple(e) for e in self.ends), tuple(tuple(x) for x in self.legs))


def _degenerations(mg: _MutableGraph, v: int) -> list:
    """All one-step degenerations available at vertex v, as (kind, data)."""
    g = mg.vertices[v]
    att = mg.attachments(v)
    opts = []
    if g >= 1:
        opts.append(("loop", None))
    n = len(att)
    # separating splits: the first attachment stays, pick a subset to move
    for mask in range(1 << max(n - 1, 0)):
        moved = [att[i + 1] for i in range(n - 1) if mask >> i & 1]
        stay = n - len(moved)
        for g1 in range(g + 1):
            g2 = g - g1
            if 2 * g1 - 2 + stay + 1 > 0 and 2 * g2 - 2 + len(moved) + 1 > 0:
                opts.append(("split", (g1, tuple(moved))))
    return opts


def _apply(mg: _MutableGraph, v: int, kind: str, data) -> None:
    if kind == "loop":
        mg.vertices[v] -= 1
        mg.ends.append([v, v])
        return
    g1, moved = data
    new = len(mg.vertices)
    mg.vertices.append(mg.vertices[v] - g1)
    mg.vertices[v] = g1
    for att in moved:
        if att[0] == "leg":
            mg.legs[att[1]][0] = new
        else:
            mg.ends[att[1]][att[2]] = new
    mg.ends.append([v, new])


def _start_graph(genus: int, insertions: Sequence[str], vacuum: str) -> _MutableGraph:
    legs = [[0, lab] for lab in insertions]
    while 2 * genus - 2 + len(legs) <= 0:
        legs.append([0, vacuum])
    return _MutableGraph([genus], [], legs)


def random_full_degeneration(genus: int, insertions: Sequence[str], vacuum: str, rng: random.Random) -> StableGraph:
    """Degenerate at random until every vertex is a genus-0 trivalent vertex."""
    mg = _start_graph(genus, insertions, vacuum)
    while True:
        open_v = [v for v, g in enumerate(mg.vertices) if g > 0 or len(mg.attachments(v)) > 3]
        if not open_v:
            return mg.freeze()
        v = rng.choice(open_v)
        kind, data = rng.choice(_degenerations(mg, v))
        _apply(mg, v, kind, data)


def enumerate_stable_graphs(genus: int, insertions: Sequence[str], vacuum: str = "V") -> list[StableGraph]:
    """Every stable graph of the given type, one per isomorphism class."""
    start = _start_graph(genus, insertions, vacuum)
    seen = {start.freeze().canonical(): start.freeze()}
    frontier = [start]
    while frontier:
        nxt = []
        for mg in frontier:
            for v in range(len(mg.vertices)):
                for kind, data in _degenerations(mg, v):
                    child = _MutableGraph(list(mg.vertices), [list(e) for e in mg.ends], [list(x) for x in mg.legs])
                    _apply(child, v, kind, data)
                    frozen = child.freeze()
                    key = frozen.canonical()
                    if key not in seen:
                        seen[key] = frozen
                        nxt.append(child)
        frontier = nxt
    return list(seen.values())


@dataclass
class InvarianceReport:
    expected: int
    values: list = field(default_factory=list)  # (seed-trial, graph, value)

    @property
    def agree(self) -> bool:
        return all(val == self.expected for _, _, val in self.values)

    @property
    def witnesses(self) -> list:
        return [(t, g, val) for t, g, val in self.values if val != self.expected]


def invariance_check(query: RankQuery, trials: int, seed: int = 0) -> InvarianceReport:
    ring = query.ring
    eng = engine_for(ring)
    ins = [ring.resolve(x) for x in query.insertions]
    report = InvarianceReport(eng.rank(query.genus, ins))
    rng = random.Random(seed)
    for t in range(trials):
        graph = random_full_degeneration(query.genus, ins, ring.vacuum, rng)
        report.values.append((t, graph, rank_via_graph(graph, ring, eng)))
    return report
