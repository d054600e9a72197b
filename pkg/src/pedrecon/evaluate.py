"""Comparing a reconstructed pedigree with the original."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations

from pedrecon.pedigree import INFINITY, Pedigree, distances_from


@dataclass
class AccuracyReport:
    accuracy: float
    pair_count: int
    matches: int
    distances: list[tuple[int, int, float, float]] = field(default_factory=list, repr=False)


def accuracy(r: Pedigree, o: Pedigree, keep_distances: bool = False) -> AccuracyReport:
    """Fraction of ordered extant pairs (diagonal included) at equal distance in ``r`` and ``o``.

    Disconnected pairs are at infinite distance, and two infinities match.
    """
    extant = o.extant
    if set(r.extant) != set(extant):
        raise ValueError("reconstructed and original pedigrees have different extant sets")
    matches = 0
    rows = []
    for i in extant:
        dr, do = distances_from(r, i), distances_from(o, i)
        for j in extant:
            a, b = dr.get(j, INFINITY), do.get(j, INFINITY)
            matches += a == b
            if keep_distances:
                rows.append((i, j, a, b))
    n = len(extant) ** 2
    return AccuracyReport(matches / n if n else 1.0, n, matches, rows)


def half_sibling_pairs(ped: Pedigree) -> list[tuple[int, int]]:
    """Same-generation pairs sharing exactly one parent."""
    out = []
    for g in range(1, ped.height + 1):
        members = [i for i in ped.generation(g) if not ped[i].is_founder]
        for a, b in combinations(members, 2):
            if len(set(ped[a].parents) & set(ped[b].parents)) == 1:
                out.append((a, b))
    return out


def half_sibling_recovery(r: Pedigree, o: Pedigree,
                          truth_pairs: list[tuple[int, int]] | None = None) -> tuple[int, int]:
    """(half-sibling pairs in ``r``, real half-sibling pairs)."""
    real = len(truth_pairs) if truth_pairs is not None else len(half_sibling_pairs(o))
    return len(half_sibling_pairs(r)), real


def report_json(report: AccuracyReport, recovery: tuple[int, int] | None = None) -> str:
    body = {k: v for k, v in asdict(report).items() if k != "distances"}
    if recovery is not None:
        body["half_sib_reconstructed"], body["half_sib_real"] = recovery
    return json.dumps(body, sort_keys=True)
