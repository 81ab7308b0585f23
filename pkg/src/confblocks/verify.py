"""Self-check suites run by ``confblocks verify``.

Each suite returns a SuiteResult; nothing here raises on a failed property.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable

from .catalog import FusionRing, kac_weight, lattice_catalog, minimal_model, minimal_model_central_charge, shipped_catalogs, validate_fusion
from .exact import LaurentJet, QSeries
from .factorization import RankQuery, engine_for, invariance_check, rank_via_graph, trivalent_closed_graph
from .fock import FockModule, FockVOA
from .genus_zero import oracle_vs_fusion, truncated_coinvariant_dim
from .nodal import INF, ChiralJetElement, KDifferentialJet, glue_check, nodal_chiral_check, prescribe_jets_p1
from .sewing import SpectralBlock, sewing_identity_report, spectral_apply_D
from .voa import ModeElement, gamma_action, lie_bracket, theta_involution


@dataclass
class SuiteResult:
    name: str
    ok: bool
    checked: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    def fail(self, witness) -> None:
        self.ok = False
        self.failures.append(witness)


def nonassociative_control_ring() -> FusionRing:
    """Two self-dual labels with N(V,V,X) = 1 and N(X,X,X) = 0: the two
    pairings of (V,V,X,X) give 1 and 2."""
    fusion = {}
    for trip, n in {("V", "V", "V"): 1, ("V", "V", "X"): 1, ("V", "X", "X"): 1}.items():
        for perm in {(a, b, c) for a, b, c in _perms(trip)}:
            fusion[perm] = n
    return FusionRing(("V", "X"), "V", {"V": "V", "X": "X"}, {"V": Fraction(0), "X": Fraction(0)}, fusion, Fraction(0))


def _perms(t):
    a, b, c = t
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


def invariance_catalogs() -> list:
    out = [lattice_catalog(k) for k in (1, 2, 3)]
    out += [e for e in shipped_catalogs() if e.family == "affine_sl2" and e.parameters[0] <= 2]
    out += [minimal_model(2, 5), minimal_model(3, 4)]
    return out


def small_queries(ring: FusionRing, max_genus: int = 2, max_insertions: int = 3):
    for g in range(max_genus + 1):
        for n in range(max_insertions + 1):
            for ins in combinations_with_replacement(ring.labels, n):
                yield g, ins


# ---------------------------------------------------------------------------
# suites


def suite_verlinde(cutoff: int) -> SuiteResult:
    res = SuiteResult("verlinde", True)
    for k in (1, 2, 3):
        ring = lattice_catalog(k).ring
        for g in range(5):
            rec = engine_for(ring).rank(g, [])
            brute = rank_via_graph(trivalent_closed_graph(g, ring.vacuum), ring)
            res.checked += 1
            if not rec == brute == (2 * k) ** g:
                res.fail((k, g, rec, brute))
    return res


def suite_invariance(cutoff: int, trials: int = 5, seed: int = 0) -> SuiteResult:
    res = SuiteResult("invariance", True)
    for entry in invariance_catalogs():
        for g, ins in small_queries(entry.ring):
            rep = invariance_check(RankQuery(g, ins, entry.ring), trials, seed)
            res.checked += 1
            if not rep.agree:
                res.fail((entry.name, g, ins, rep.expected, [w[2] for w in rep.witnesses]))
    bad = nonassociative_control_ring()
    witnessed = any(
        not invariance_check(RankQuery(g, ins, bad), trials, seed).agree for g, ins in small_queries(bad)
    )
    res.checked += 1
    if not witnessed:
        res.fail(("negative control", "no disagreement witnessed"))
    return res


def suite_catalogs(cutoff: int) -> SuiteResult:
    res = SuiteResult("catalogs", True)
    for entry in shipped_catalogs():
        rep = validate_fusion(entry.ring)
        res.checked += 1
        if not rep.ok:
            res.fail((entry.name, rep.summary()))
        res.checked += 1
        if engine_for(entry.ring).rank(1, []) != len(entry.ring.labels):
            res.fail((entry.name, "genus-1 rank differs from the label count"))
    return res


def suite_formulas(cutoff: int) -> SuiteResult:
    res = SuiteResult("formulas", True)
    expected = {
        (2, 5): (Fraction(-22, 5), {Fraction(0), Fraction(-1, 5)}),
        (3, 4): (Fraction(1, 2), {Fraction(0), Fraction(1, 2), Fraction(1, 16)}),
        (2, 3): (Fraction(0), {Fraction(0)}),
    }
    for (p, q), (c, weights) in expected.items():
        ring = minimal_model(p, q).ring
        res.checked += 1
        if ring.central_charge != c or set(ring.weights.values()) != weights or len(ring.labels) != (p - 1) * (q - 1) // 2:
            res.fail(((p, q), ring.central_charge, sorted(ring.weights.values())))
    for entry in shipped_catalogs():
        if entry.family != "virasoro_minimal":
            continue
        p, q = entry.parameters
        res.checked += 1
        if entry.ring.central_charge != minimal_model_central_charge(p, q):
            res.fail((entry.name, "central charge"))
        kac = {kac_weight(p, q, m, n) for m in range(1, p) for n in range(1, q)}
        if set(entry.ring.weights.values()) != kac:
            res.fail((entry.name, "weights"))
    return res


def suite_sewing(cutoff: int) -> SuiteResult:
    res = SuiteResult("sewing", True)
    D = max(cutoff, 1)
    voa = FockVOA(max(D, 3), k=1)
    for lab in (0, 1):
        mod = FockModule(voa, lab, D)
        for a in voa.basis(3):
            for i in range(3):
                for j in range(3):
                    rep = sewing_identity_report({a: Fraction(1)}, i, j, mod, D)
                    res.checked += 1
                    if not rep.ok:
                        res.fail((lab, a, i, j, rep.mismatches[:1]))
    return res


def suite_involutions(cutoff: int) -> SuiteResult:
    res = SuiteResult("involutions", True)
    D = max(cutoff, 4)
    for voa in (FockVOA(D), FockVOA(D, k=1)):
        for a in voa.basis(D):
            once = gamma_action({a: Fraction(1)}, voa)
            res.checked += 1
            if gamma_action(once, voa) != {a: 1}:
                res.fail(("gamma", a))
    voa = FockVOA(4, k=1)
    for a in voa.basis(4):
        for j in range(-4, 5):
            x = ModeElement.single(a, j)
            tx = theta_involution(x, voa)
            res.checked += 1
            if theta_involution(tx, voa) != x:
                res.fail(("theta", a, j))
            if x.degrees(voa) == {0} and tx.degrees(voa) - {0}:
                res.fail(("theta degree", a, j))
    return res


def suite_brackets(cutoff: int) -> SuiteResult:
    """lie_bracket against module commutators on the degree <= 3 window."""
    res = SuiteResult("brackets", True)
    voa = FockVOA(6, k=1)
    window = 3
    for lab in (0, 1):
        mod = FockModule(voa, lab, window)
        for a in voa.basis(window):
            for b in voa.basis(window):
                da, db = int(voa.degree(a)), int(voa.degree(b))
                for m in range(-window, window + da):
                    for n in range(-window, window + db):
                        br = None
                        for v in mod.basis(window):
                            dv = mod.relative_degree(v)
                            if max(dv + da - m - 1, dv + db - n - 1, dv + da + db - m - n - 2) > window:
                                continue
                            if min(dv + da - m - 1, dv + db - n - 1) < 0 and dv + da + db - m - n - 2 < 0:
                                continue
                            if br is None:
                                br = lie_bracket(ModeElement.single(a, m), ModeElement.single(b, n), voa)
                            lhs = _commutator(mod, a, m, b, n, v)
                            res.checked += 1
                            if lhs != mod.act(br, {v: Fraction(1)}):
                                res.fail((lab, a, m, b, n, v))
    return res


def _commutator(mod, a, m, b, n, v) -> dict:
    one = {v: Fraction(1)}
    out = dict(mod.mode(a, m, mod.mode(b, n, one)))
    for x, c in mod.mode(b, n, mod.mode(a, m, one)).items():
        out[x] = out.get(x, 0) - c
    return {x: c for x, c in out.items() if c}


def suite_oracle(cutoff: int) -> SuiteResult:
    res = SuiteResult("oracle", True)
    D = min(max(cutoff, 2), 4)
    for k in (1, 2):
        entry = lattice_catalog(k)
        rep = oracle_vs_fusion(entry, D)
        res.checked += len(rep.rows)
        for row in rep.mismatches:
            res.fail((entry.name, D) + tuple(row))
    # charge-violating triples vanish at every cutoff
    voa = FockVOA(4, k=1)
    for d in range(D + 1):
        for trip in ((1, 0, 0), (1, 1, 1)):
            res.checked += 1
            est = truncated_coinvariant_dim(list(trip), (0, 1, -1), voa, d)
            if est.estimate:
                res.fail(("charge", trip, d, est.estimate))
    bad = lattice_catalog(1).ring
    fusion = dict(bad.fusion)
    fusion[("0", "0", "0")] = 2
    corrupted = FusionRing(bad.labels, bad.vacuum, bad.dual, bad.weights, fusion, bad.central_charge)
    res.checked += 1
    if oracle_vs_fusion(lattice_catalog(1), 2, ring=corrupted).ok:
        res.fail(("negative control", "corrupted entry not detected"))
    return res


def random_jet(rng: random.Random, low: int, tail: int) -> LaurentJet:
    return LaurentJet("s", {e: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for e in range(low, tail)}, tail)


def suite_gluing(cutoff: int, samples: int = 50, seed: int = 0) -> SuiteResult:
    res = SuiteResult("gluing", True)
    rng = random.Random(seed)
    for k in (0, 1, 2):
        for _ in range(samples):
            plus, minus = random_jet(rng, -k, 3), random_jet(rng, -k, 3)
            if rng.random() < 0.5:
                # force the gluing condition half of the time
                sign = -1 if k % 2 else 1
                terms = dict(minus.terms)
                terms[-k] = sign * plus.coeff(-k)
                minus = LaurentJet("s", terms, minus.tail_order)
            if k == 0:
                expected = plus.coeff(0) == minus.coeff(0)
            elif k == 1:
                expected = plus.coeff(-1) == -minus.coeff(-1)
            else:
                expected = plus.coeff(-2) == minus.coeff(-2)
            res.checked += 1
            if glue_check(KDifferentialJet(k, plus, minus)) != expected:
                res.fail((k, plus, minus))
    voa = FockVOA(3, k=1)
    omega = (0, (1, 1))
    # omega pairs with (-1)-differentials; the degree-0 part of omega_[j] is j = 1
    for c in (1, 2, -3):
        plus = LaurentJet("s", {1: Fraction(c)}, 3)
        good = ChiralJetElement({omega: KDifferentialJet(-1, plus, LaurentJet("s", {1: Fraction(-c)}, 3))})
        flipped = ChiralJetElement({omega: KDifferentialJet(-1, plus, LaurentJet("s", {1: Fraction(c)}, 3))})
        res.checked += 2
        if not nodal_chiral_check(good, voa):
            res.fail(("theta-matched rejected", c))
        if nodal_chiral_check(flipped, voa):
            res.fail(("sign-flipped accepted", c))
    return res


def rr_instances(count: int = 20, seed: int = 0) -> list:
    rng = random.Random(seed)
    out = []
    pool = [Fraction(x) for x in (0, 1, -1, 2, -2, 3)] + [Fraction(1, 2)]
    while len(out) < count:
        k = rng.choice((-1, 0, 1, 2))
        npts = rng.randint(1, 4)
        pts = rng.sample(pool, npts)
        if npts < 4 and rng.random() < 0.3:
            pts[-1] = INF
        N = rng.randint(1, 6)
        target = (rng.randrange(npts), rng.randint(-2, N - 1))
        poles = (Fraction(5),) if INF in pts else (INF,)
        out.append((pts, k, target, N, poles))
    return out


def check_rr(pts, k, target, N, poles=(INF,)) -> bool:
    sec = prescribe_jets_p1(pts, k, target, N, pole_points=poles)
    for n, q in enumerate(pts):
        jet = sec.expand(q, N)
        want = {target[1]: Fraction(1)} if n == target[0] else {}
        if {e: c for e, c in jet.terms.items() if e < N and c} != want:
            return False
    if k == 1 and sum(sec.residues().values()) != 0:
        return False
    return True


def suite_riemann_roch(cutoff: int) -> SuiteResult:
    res = SuiteResult("riemann-roch", True)
    for inst in rr_instances():
        res.checked += 1
        if not check_rr(*inst):
            res.fail(inst)
    return res


def suite_spectral(cutoff: int) -> SuiteResult:
    res = SuiteResult("spectral", True)
    D = max(cutoff, 8)
    for entry in shipped_catalogs():
        series = {lab: QSeries(D, tuple(Fraction(1) for _ in range(D + 1))) for lab in entry.ring.labels}
        out = spectral_apply_D(SpectralBlock(series, dict(entry.ring.weights)))
        for lab in entry.ring.labels:
            for d in range(D + 1):
                res.checked += 1
                if out.series[lab][d] != d + entry.ring.weights[lab]:
                    res.fail((entry.name, lab, d))
    return res


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "verlinde": suite_verlinde,
    "invariance": suite_invariance,
    "catalogs": suite_catalogs,
    "formulas": suite_formulas,
    "sewing": suite_sewing,
    "involutions": suite_involutions,
    "brackets": suite_brackets,
    "oracle": suite_oracle,
    "gluing": suite_gluing,
    "riemann-roch": suite_riemann_roch,
    "spectral": suite_spectral,
}


def run_suites(names, cutoff: int) -> list[SuiteResult]:
    out = []
    for name in names:
        start = time.perf_counter()
        result = SUITES[name](cutoff)
        result.seconds = time.perf_counter() - start
        out.append(result)
    return out
