"""The q-graded identity element of W (x) W', the vanishing identity it
satisfies, and the q d/dq + c_W bookkeeping on graded blocks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exact import QSeries, Vector, vaxpy
from .voa import ModeElement, TruncatedModule, contragredient_matrix, contragredient_mode, theta_involution


@dataclass(frozen=True)
class SewingElement:
    """sum_i 1^{W_i} q^i, stored as the basis of each W_i paired with its dual basis."""

    module: TruncatedModule
    cutoff: int

    def component(self, i: int) -> list:
        return [(e, e) for e in self.module.basis(i) if self.module.relative_degree(e) == i]

    def contraction(self, i: int) -> int:
        # <e^*, e> = 1 for each basis pair
        return sum(1 for e, f in self.component(i) if e == f)


def sewn_character(module: TruncatedModule, cutoff: int) -> QSeries:
    el = SewingElement(module, cutoff)
    return QSeries(cutoff, tuple(el.contraction(i) for i in range(cutoff + 1)))


def act_on_dual(x: ModeElement, psi: Mapping, module: TruncatedModule) -> Vector:
    """A mode element acting on a homogeneous functional of the graded dual."""
    out: Vector = {}
    for (a, n), c in x.terms.items():
        vaxpy(out, c, contragredient_mode({a: Fraction(1)}, n, psi, module))
    return out


@dataclass
class SewingReport:
    ok: bool
    checked: int
    mismatches: list


def sewing_identity_report(A: Mapping, i: int, j: int, module: TruncatedModule, cutoff: int) -> SewingReport:
    """(A_[n] (x) 1 + 1 (x) theta(A_[n]) q^{i-j}) 1^W = 0 with n = i - j + k - 1.

    The coefficient of e' (x) e^* q^{deg e} is <e'^*, A_[n] e> from the first
    term and (theta(A_[n]) e'^*)(e) from the second.
    """
    voa = module.voa
    k = int(voa.vector_degree(A))
    n = i - j + k - 1
    x = ModeElement.from_vector(A, n)
    tx = theta_involution(x, voa)
    shift = j - i  # degree of x
    window = [e for e in module.basis(cutoff)]
    first: dict = {}
    for e in window:
        d = module.relative_degree(e)
        if not 0 <= d + shift <= cutoff:
            continue
        for ep, c in module.act(x, {e: Fraction(1)}).items():
            first[(ep, e)] = c
    second: dict = {}
    for dp in range(cutoff + 1):
        if not 0 <= dp - shift <= cutoff:
            continue
        for (a, m), c in tx.terms.items():
            for ep, functional in contragredient_matrix({a: Fraction(1)}, m, module, dp).items():
                for e, v in functional.items():
                    key = (ep, e)
                    second[key] = second.get(key, 0) + c * v
    mismatches = []
    keys = set(first) | set(second)
    for key in keys:
        if first.get(key, 0) + second.get(key, 0):
            mismatches.append((key, first.get(key, 0), second.get(key, 0)))
    return SewingReport(not mismatches, len(keys), mismatches)


def sewing_identity_check(A: Mapping, i: int, j: int, module: TruncatedModule, cutoff: int) -> bool:
    return sewing_identity_report(A, i, j, module, cutoff).ok


# ---------------------------------------------------------------------------
# spectral bookkeeping


@dataclass(frozen=True)
class SpectralBlock:
    series: Mapping  # label -> QSeries
    shifts: Mapping  # label -> Fraction c_W


def spectral_apply_D(block: SpectralBlock) -> SpectralBlock:
    """sum a_d q^d  ->  sum (d + c_W) a_d q^d in every block."""
    out = {}
    for label, s in block.series.items():
        c = Fraction(block.shifts[label])
        out[label] = QSeries(s.cutoff, tuple((d + c) * a for d, a in enumerate(s.coefficients)))
    return SpectralBlock(out, dict(block.shifts))
