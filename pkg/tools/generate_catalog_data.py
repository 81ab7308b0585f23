"""Regenerate the shipped fusion-ring data files.

Minimal-model fusion is assembled from two affine sl2 fusion tables (levels
p-2 and q-2) over the Kac table, summing over the two representatives of the
third label; sl2 fusion uses the truncated Clebsch-Gordan rule.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "confblocks" / "data"
VERSION = 1


def su2(level: int, a: int, b: int, c: int) -> int:
    ok = abs(a - b) <= c <= min(a + b, 2 * level - a - b) and (a + b + c) % 2 == 0
    return int(ok)


def fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def kac_labels(p: int, q: int) -> list[tuple[int, int]]:
    reps = []
    for m in range(1, p):
        for n in range(1, q):
            rep = min((m, n), (p - m, q - n))
            if rep not in reps:
                reps.append(rep)
    return sorted(reps)


def minimal_model_doc(p: int, q: int) -> dict:
    labels = kac_labels(p, q)
    name = {lab: f"{lab[0]}_{lab[1]}" for lab in labels}
    c = 1 - Fraction(6 * (p - q) ** 2, p * q)
    weights = {name[(m, n)]: fmt(Fraction((n * p - m * q) ** 2 - (p - q) ** 2, 4 * p * q)) for m, n in labels}
    fusion = []
    for x, y, z in combinations_with_replacement(labels, 3):
        mult = 0
        for zz in (z, (p - z[0], q - z[1])):
            mult += su2(p - 2, x[0] - 1, y[0] - 1, zz[0] - 1) * su2(q - 2, x[1] - 1, y[1] - 1, zz[1] - 1)
        if mult:
            fusion.append([name[x], name[y], name[z], mult])
    aliases = {"V": "1_1"}
    if (p, q) == (2, 5):
        aliases["X"] = "1_2"
    if (p, q) == (3, 4):
        aliases.update({"epsilon": "1_3", "sigma": "1_2"})
    return {
        "format_version": VERSION,
        "family": "virasoro_minimal",
        "parameters": [p, q],
        "labels": [name[lab] for lab in labels],
        "vacuum": "1_1",
        "dual": [[name[lab], name[lab]] for lab in labels],
        "central_charge": fmt(c),
        "weights": weights,
        "fusion": fusion,
        "aliases": aliases,
        "provenance": "Kac-table labels modulo (m,n)~(p-m,q-n); fusion = product of sl2 levels p-2, q-2 "
        "summed over both representatives of the third label; self-dual family.",
    }


def sl2_doc(level: int) -> dict:
    labels = [str(a) for a in range(level + 1)]
    fusion = []
    for a, b, c in combinations_with_replacement(range(level + 1), 3):
        if su2(level, a, b, c):
            fusion.append([str(a), str(b), str(c), 1])
    return {
        "format_version": VERSION,
        "family": "affine_sl2",
        "parameters": [level],
        "labels": labels,
        "vacuum": "0",
        "dual": [[x, x] for x in labels],
        "central_charge": fmt(Fraction(3 * level, level + 2)),
        "weights": {str(a): fmt(Fraction(a * (a + 2), 4 * (level + 2))) for a in range(level + 1)},
        "fusion": fusion,
        "aliases": {"V": "0"},
        "provenance": "Truncated Clebsch-Gordan fusion; weights and central charge from the Sugawara "
        "construction (external input, not derived here); self-dual family.",
    }


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    for p in range(2, 8):
        for q in range(p + 1, 21):
            if gcd(p, q) == 1 and p * q <= 40:
                (DATA / f"virasoro_{p}_{q}.json").write_text(json.dumps(minimal_model_doc(p, q), indent=1) + "\n")
    for level in range(1, 7):
        (DATA / f"sl2_{level}.json").write_text(json.dumps(sl2_doc(level), indent=1) + "\n")


if __name__ == "__main__":
    main()
