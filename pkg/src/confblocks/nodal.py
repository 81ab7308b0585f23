"""k-differentials near a node, chiral data at the two branches, and an exact
Riemann-Roch jet constructor on the projective line."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import LaurentJet, as_fraction, binomial, solve_linear
from .voa import ModeElement, TruncatedVOA, theta_involution

INF = "inf"


class OrderViolation(ValueError):
    pass


class InfeasibleSystem(ArithmeticError):
    pass


def k_residue(jet: LaurentJet, k: int) -> Fraction:
    """Coefficient of s^{-k} (ds)^k; needs ord >= -k."""
    if jet.order() < -k:
        raise OrderViolation(f"order {jet.order()} is below {-k}")
    return jet.coeff(-k)


@dataclass(frozen=True)
class KDifferentialJet:
    """Laurent data of a k-differential at the two preimages of a node."""

    k: int
    plus: LaurentJet
    minus: LaurentJet


def glue_check(jet: KDifferentialJet) -> bool:
    """ord >= -k on both branches and Res_+ = (-1)^k Res_-."""
    k = jet.k
    if jet.plus.order() < -k or jet.minus.order() < -k:
        return False
    sign = -1 if k % 2 else 1
    return k_residue(jet.plus, k) == sign * k_residue(jet.minus, k)


# ---------------------------------------------------------------------------
# chiral data at a node


@dataclass(frozen=True)
class ChiralJetElement:
    """Per basis vector A of V, the (1 - deg A)-differential jets paired with A."""

    components: Mapping = field(default_factory=dict)  # label -> KDifferentialJet


def _mode_side(label, jet: LaurentJet) -> ModeElement:
    return ModeElement({(label, e): c for e, c in jet.terms.items()})


def chiral_modes(sigma: ChiralJetElement, voa: TruncatedVOA) -> tuple[ModeElement, ModeElement]:
    plus, minus = ModeElement(), ModeElement()
    for label, jet in sigma.components.items():
        if jet.k != 1 - int(voa.degree(label)):
            raise ValueError(f"component {label} must be a {1 - int(voa.degree(label))}-differential")
        plus = plus + _mode_side(label, jet.plus)
        minus = minus + _mode_side(label, jet.minus)
    return plus, minus


def nodal_chiral_check(sigma: ChiralJetElement, voa: TruncatedVOA) -> bool:
    """Both branches have non-positive mode degree and their degree-0 parts
    are exchanged by theta."""
    for label, jet in sigma.components.items():
        need = int(voa.degree(label)) - 1
        for side in (jet.plus, jet.minus):
            if side.tail_order <= need:
                raise ValueError("jet is not known up to the degree-0 coefficient")
            if side.order() < need:
                return False
    plus, minus = chiral_modes(sigma, voa)
    p0 = plus.degree_part(voa, 0)
    m0 = minus.degree_part(voa, 0)
    return voa.normal_form(m0) == voa.normal_form(theta_involution(p0, voa))


# ---------------------------------------------------------------------------
# rational k-differentials on P^1


@dataclass(frozen=True)
class RationalSection:
    """f(z) (dz)^k with f = sum c (z - p)^{-m} + sum c z^e."""

    k: int
    poles: Mapping  # finite point -> {order m >= 1: coeff}
    polynomial: Mapping  # exponent e >= 0 -> coeff

    def pole_points(self) -> list:
        pts = [p for p, terms in self.poles.items() if any(terms.values())]
        if self.order_at(INF) < 0:
            pts.append(INF)
        return pts

    def expand(self, point, upto: int) -> LaurentJet:
        """Jet of f(s) (ds)^k at a point in its standard coordinate
        (s = z - p, or s = 1/z at infinity), exact below exponent ``upto``."""
        terms: dict[int, Fraction] = {}

        def add(e, c):
            if e < upto and c:
                terms[e] = terms.get(e, 0) + c

        if point == INF:
            sign = -1 if self.k % 2 else 1
            shift = -2 * self.k
            for p, orders in self.poles.items():
                for m, c in orders.items():
                    # (z - p)^{-m} = w^m (1 - p w)^{-m}
                    j = 0
                    while m + j + shift < upto:
                        add(m + j + shift, sign * c * binomial(m + j - 1, j) * Fraction(p) ** j)
                        if p == 0:
                            break
                        j += 1
            for e, c in self.polynomial.items():
                add(-e + shift, sign * c)
            return LaurentJet("w", terms, upto)
        q = as_fraction(point)
        for p, orders in self.poles.items():
            p = as_fraction(p)
            for m, c in orders.items():
                if p == q:
                    add(-m, c)
                    continue
                for j in range(0, max(upto, 0)):
                    add(j, c * binomial(-m, j) * (q - p) ** (-m - j))
        for e, c in self.polynomial.items():
            for j in range(0, e + 1):
                add(j, c * binomial(e, j) * q ** (e - j))
        return LaurentJet("s", terms, upto)

    def order_at(self, point) -> int:
        jet = self.expand(point, self._probe(point))
        return jet.order() if jet.terms else jet.tail_order

    def _probe(self, point) -> int:
        depth = max([m for orders in self.poles.values() for m in orders] + list(self.polynomial) + [0])
        return 2 * abs(self.k) + depth + 2

    def residues(self) -> dict:
        """Classical residues (coefficient of s^{-1}) at every pole, infinity included."""
        if self.k != 1:
            raise ValueError("residues are defined for 1-differentials")
        out = {}
        for p in list(self.poles) + [INF]:
            out[p] = self.expand(p, 0).coeff(-1)
        return out


def prescribe_jets_p1(
    q_points: Sequence,
    k: int,
    target: tuple[int, int],
    modulus: int,
    pole_points: Sequence = (INF,),
    pole_bound: int | None = None,
) -> RationalSection:
    """A k-differential on P^1, regular away from Q and the pole set, whose
    jet at Q_i is s^d (ds)^k mod s^N and vanishes mod s^N at the other Q."""
    q_points = [x if x == INF else as_fraction(x) for x in q_points]
    pole_points = [x if x == INF else as_fraction(x) for x in pole_points]
    allpts = q_points + pole_points
    if len(set(allpts)) != len(allpts):
        raise ValueError("points must be distinct")
    ti, d = target
    N = modulus
    if pole_bound is None:
        pole_bound = len(q_points) * (N + max(0, -d)) + 2 * abs(k) + 2
    # unknowns
    unknowns: list = []
    for n, q in enumerate(q_points):
        if q != INF and n == ti and d < 0:
            unknowns += [("pole", q, m) for m in range(1, -d + 1)]
    for p in pole_points:
        if p != INF:
            unknowns += [("pole", p, m) for m in range(1, pole_bound + 1)]
    inf_free = INF in pole_points or INF in q_points
    if INF in pole_points:
        top = pole_bound
    elif INF in q_points:
        top = max(0, -d - 2 * k) if q_points.index(INF) == ti else max(0, -2 * k)
    else:
        top = -2 * k
    unknowns += [("poly", e) for e in range(0, top + 1)]

    def basis_section(u) -> RationalSection:
        if u[0] == "pole":
            return RationalSection(k, {u[1]: {u[2]: Fraction(1)}}, {})
        return RationalSection(k, {}, {u[1]: Fraction(1)})

    rows, rhs = [], []
    checks = [(n, q) for n, q in enumerate(q_points)]
    if not inf_free:
        checks.append((None, INF))
    for n, q in checks:
        upto = N if n is not None else 0
        jets = [basis_section(u).expand(q, upto) for u in unknowns]
        exps = set()
        for jet in jets:
            exps.update(jet.terms)
        if n == ti:
            exps.add(d)
        for e in sorted(exps):
            if e >= upto:
                continue
            rows.append({j: jet.terms[e] for j, jet in enumerate(jets) if e in jet.terms})
            rhs.append(Fraction(1) if (n == ti and e == d) else Fraction(0))
    sol = solve_linear(rows, rhs, len(unknowns))
    if sol is None:
        raise InfeasibleSystem("no section with the requested jets in the ansatz")
    poles: dict = {}
    poly: dict = {}
    for u, c in zip(unknowns, sol):
        if not c:
            continue
        if u[0] == "pole":
            poles.setdefault(u[1], {})[u[2]] = c
        else:
            poly[u[1]] = c
    return RationalSection(k, poles, poly)
