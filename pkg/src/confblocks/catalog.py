"""Fusion rings for rational vertex algebras: data model, loader, validator
and the built-in families."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import permutations, product
from math import gcd
from pathlib import Path
from typing import Mapping

from .exact import as_fraction, format_fraction

CATALOG_DIR_ENV = "CONFBLOCKS_CATALOG_DIR"


class CatalogError(ValueError):
    """Unknown selector or malformed catalog document."""


class FusionValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        super().__init__(report.summary())
        self.report = report


@dataclass(frozen=True)
class FusionRing:
    labels: tuple
    vacuum: str
    dual: Mapping[str, str]
    weights: Mapping[str, Fraction]
    fusion: Mapping[tuple, int]  # ordered triples; absent means 0
    central_charge: Fraction
    aliases: Mapping[str, str] = field(default_factory=dict)

    def N(self, a: str, b: str, c: str) -> int:
        return self.fusion.get((a, b, c), 0)

    def dual_of(self, a: str) -> str:
        return self.dual[a]

    def resolve(self, name: str) -> str:
        name = name.strip()
        if name in self.labels:
            return name
        if name in self.aliases:
            return self.aliases[name]
        raise CatalogError(f"unknown module label {name!r}; known: {', '.join(self.labels)}")


@dataclass(frozen=True)
class CatalogEntry:
    family: str
    parameters: tuple
    ring: FusionRing
    provenance: str = ""

    @property
    def name(self) -> str:
        if self.family == "virasoro_minimal":
            return "virasoro:%d,%d" % self.parameters
        if self.family == "affine_sl2":
            return "sl2:%d" % self.parameters
        if self.family == "lattice":
            return "lattice:%d" % self.parameters
        return "custom"


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)  # (constraint, witness)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, constraint: str, witness) -> None:
        self.failures.append((constraint, witness))

    def summary(self) -> str:
        if self.ok:
            return "pass"
        head = ", ".join(f"{c} {w}" for c, w in self.failures[:5])
        more = f" (+{len(self.failures) - 5} more)" if len(self.failures) > 5 else ""
        return f"fail: {head}{more}"


def validate_fusion(ring: FusionRing) -> ValidationReport:
    rep = ValidationReport()
    labels = list(ring.labels)
    lab_set = set(labels)
    if len(lab_set) != len(labels):
        rep.add("labels-unique", tuple(labels))
    if ring.vacuum not in lab_set:
        rep.add("vacuum-present", (ring.vacuum,))
        return rep
    for a in labels:
        if a not in ring.dual or ring.dual[a] not in lab_set:
            rep.add("dual-defined", (a,))
    if not rep.ok:
        return rep
    for a in labels:
        if a not in ring.weights:
            rep.add("weight-defined", (a,))
    for key, n in ring.fusion.items():
        if any(x not in lab_set for x in key) or not isinstance(n, int) or n < 0:
            rep.add("multiplicity-domain", key + (n,))
    for a in labels:
        if ring.dual[ring.dual[a]] != a:
            rep.add("dual-involution", (a,))
    if ring.dual[ring.vacuum] != ring.vacuum:
        rep.add("dual-vacuum", (ring.vacuum,))
    V = ring.vacuum
    for w, y in product(labels, repeat=2):
        if ring.N(V, w, y) != int(y == ring.dual[w]):
            rep.add("unit-law", (V, w, y))
    for t in product(labels, repeat=3):
        for s in set(permutations(t)):
            if ring.N(*s) != ring.N(*t):
                rep.add("symmetry", t)
                break
    for w1, w2, w3, w4 in product(labels, repeat=4):
        lhs = sum(ring.N(w1, w2, t) * ring.N(ring.dual[t], w3, w4) for t in labels)
        rhs = sum(ring.N(w1, w3, t) * ring.N(ring.dual[t], w2, w4) for t in labels)
        if lhs != rhs:
            rep.add("associativity", (w1, w2, w3, w4))
    return rep


# ---------------------------------------------------------------------------
# documents


def ring_from_document(doc: Mapping, force: bool = False) -> FusionRing:
    try:
        labels = tuple(str(x) for x in doc["labels"])
        vacuum = str(doc["vacuum"])
        dual = {}
        for a, b in doc.get("dual", []):
            dual[str(a)] = str(b)
            dual.setdefault(str(b), str(a))
        weights = {str(k): as_fraction(v) for k, v in doc.get("weights", {}).items()}
        c = as_fraction(doc.get("central_charge", "0"))
        fusion: dict = {}
        explicit: dict = {}
        for entry in doc.get("fusion", []):
            a, b, cc, n = entry
            explicit[(str(a), str(b), str(cc))] = n
        for key, n in explicit.items():
            for perm in set(permutations(key)):
                if perm in explicit and perm != key:
                    continue
                fusion[perm] = n
        for key, n in explicit.items():
            fusion[key] = n
        fusion = {k: v for k, v in fusion.items() if v != 0}
        aliases = {str(k): str(v) for k, v in doc.get("aliases", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"malformed fusion-ring document: {exc}") from exc
    ring = FusionRing(labels, vacuum, dual, weights, fusion, c, aliases)
    if not force:
        report = validate_fusion(ring)
        if not report.ok:
            raise FusionValidationError(report)
    return ring


def ring_to_document(ring: FusionRing) -> dict:
    seen = set()
    fusion = []
    for key in sorted(ring.fusion):
        canon = tuple(sorted(key))
        if canon in seen:
            continue
        seen.add(canon)
        if all(ring.N(*p) == ring.N(*key) for p in permutations(key)):
            fusion.append([*canon, ring.N(*canon)])
        else:
            fusion.extend([*p, ring.N(*p)] for p in sorted(set(permutations(key))))
    return {
        "labels": list(ring.labels),
        "vacuum": ring.vacuum,
        "dual": [[a, ring.dual[a]] for a in ring.labels],
        "central_charge": format_fraction(ring.central_charge),
        "weights": {a: format_fraction(ring.weights[a]) for a in ring.labels if a in ring.weights},
        "fusion": fusion,
        "aliases": dict(ring.aliases),
    }


def load_ring(path: str | os.PathLike, force: bool = False) -> FusionRing:
    with open(path, encoding="utf-8") as fh:
        return ring_from_document(json.load(fh), force=force)


@lru_cache(maxsize=None)
def _shipped(name: str) -> dict:
    ref = resources.files("confblocks") / "data" / name
    if not ref.is_file():
        raise CatalogError(f"no shipped data file {name}")
    return json.loads(ref.read_text(encoding="utf-8"))


def shipped_files() -> list[str]:
    return sorted(p.name for p in (resources.files("confblocks") / "data").iterdir() if p.name.endswith(".json"))


# ---------------------------------------------------------------------------
# built-in families


def minimal_model_central_charge(p: int, q: int) -> Fraction:
    return 1 - Fraction(6 * (p - q) ** 2, p * q)


def kac_weight(p: int, q: int, m: int, n: int) -> Fraction:
    return Fraction((n * p - m * q) ** 2 - (p - q) ** 2, 4 * p * q)


def minimal_model(p: int, q: int) -> CatalogEntry:
    if not (1 < p < q) or gcd(p, q) != 1:
        raise CatalogError(f"minimal model needs coprime 1 < p < q, got ({p},{q})")
    try:
        doc = _shipped(f"virasoro_{p}_{q}.json")
    except CatalogError:
        raise CatalogError(f"no shipped fusion data for virasoro ({p},{q})") from None
    ring = ring_from_document(doc)
    c = minimal_model_central_charge(p, q)
    if ring.central_charge != c:
        raise CatalogError("shipped central charge disagrees with the Kac formula")
    for lab in ring.labels:
        m, n = (int(x) for x in lab.split("_"))
        if ring.weights[lab] != kac_weight(p, q, m, n):
            raise CatalogError(f"shipped weight of {lab} disagrees with the Kac formula")
    return CatalogEntry("virasoro_minimal", (p, q), ring, doc.get("provenance", ""))


def affine_sl2(level: int) -> CatalogEntry:
    if level < 1:
        raise CatalogError("level must be positive")
    try:
        doc = _shipped(f"sl2_{level}.json")
    except CatalogError:
        raise CatalogError(f"no shipped fusion data for sl2 level {level}") from None
    return CatalogEntry("affine_sl2", (level,), ring_from_document(doc), doc.get("provenance", ""))


def lattice_catalog(k: int) -> CatalogEntry:
    if k < 1:
        raise CatalogError("lattice parameter k must be positive")
    from .fock import lowest_weight

    mod = 2 * k
    labels = tuple(str(x) for x in range(mod))
    dual = {str(x): str((-x) % mod) for x in range(mod)}
    fusion = {}
    for a, b, c in product(range(mod), repeat=3):
        if (a + b + c) % mod == 0:
            fusion[(str(a), str(b), str(c))] = 1
    weights = {str(x): lowest_weight(k, x) for x in range(mod)}
    ring = FusionRing(labels, "0", dual, weights, fusion, Fraction(1), {"V": "0"})
    note = "Cosets of sqrt(2k)Z in its dual; fusion is the group law; weights from the implemented L_0."
    return CatalogEntry("lattice", (k,), ring, note)


def custom_catalog(path: str | os.PathLike, force: bool = False) -> CatalogEntry:
    return CatalogEntry("custom", (str(path),), load_ring(path, force=force), f"loaded from {path}")


def shipped_catalogs() -> list[CatalogEntry]:
    out = [lattice_catalog(k) for k in (1, 2, 3)]
    for name in shipped_files():
        stem = name[:-5]
        fam, *params = stem.split("_")
        if fam == "sl2":
            out.append(affine_sl2(int(params[0])))
        elif fam == "virasoro":
            out.append(minimal_model(int(params[0]), int(params[1])))
    return out


def from_selector(selector: str, force: bool = False) -> CatalogEntry:
    """Parse ``lattice:K``, ``sl2:L``, ``virasoro:P,Q``, ``file:PATH`` or a bare
    name looked up in the catalog directory."""
    sel = selector.strip()
    fam, _, arg = sel.partition(":")
    try:
        if fam == "lattice":
            return lattice_catalog(int(arg))
        if fam in ("sl2", "affine_sl2"):
            return affine_sl2(int(arg))
        if fam in ("virasoro", "minimal"):
            p, q = (int(x) for x in arg.split(","))
            return minimal_model(p, q)
    except ValueError as exc:
        if isinstance(exc, (CatalogError, FusionValidationError)):
            raise
        raise CatalogError(f"bad catalog selector {selector!r}") from exc
    if fam == "file":
        return custom_catalog(arg, force=force)
    directory = os.environ.get(CATALOG_DIR_ENV)
    if directory:
        for cand in (Path(directory) / sel, Path(directory) / f"{sel}.json"):
            if cand.is_file():
                return custom_catalog(cand, force=force)
    raise CatalogError(f"unknown catalog {selector!r}")
