"""Inheritance-path-pair tables.

An ancestor's table maps each extant descendant to a histogram of the
lengths of the inheritance paths joining them, as ``(length, count)``
entries with unique lengths. Tables are filled one generation at a time:
parents of extant individuals get ``(1, 1)`` per child, and every older
ancestor merges its children's tables with lengths shifted by one.
"""

from __future__ import annotations

from typing import Iterable, Mapping, TextIO

from pedrecon.pedigree import Pedigree

IppEntry = tuple[int, int]
IppTable = dict[int, list[IppEntry]]

COUNT_MAX = 2**64 - 1


def _sat_add(a: int, b: int) -> int:
    return min(a + b, COUNT_MAX)


def init_generation2(children: Iterable[int]) -> IppTable:
    """Table of a parent whose children are all extant."""
    return {child: [(1, 1)] for child in sorted(children)}


def merge_increment(child_tables: Iterable[Mapping[int, list[IppEntry]]]) -> IppTable:
    """Merge children's tables, lengthening every path by one edge."""
    merged: dict[int, dict[int, int]] = {}
    for table in child_tables:
        for descendant, entries in table.items():
            hist = merged.setdefault(descendant, {})
            for length, count in entries:
                hist[length + 1] = _sat_add(hist.get(length + 1, 0), count)
    return {d: sorted(hist.items()) for d, hist in sorted(merged.items())}


def compute_dis(t: int, ipp_i: list[IppEntry], ipp_j: list[IppEntry]) -> float:
    """Count-weighted mean length of the concatenated paths, plus ``t``."""
    if not ipp_i or not ipp_j:
        raise ValueError("compute_dis needs two non-empty path histograms")
    length = 0
    num = 0
    for l_a, n_a in ipp_i:
        for l_b, n_b in ipp_j:
            num += n_a * n_b
            length += (l_a + l_b + t) * (n_a * n_b)
    return length / num


def mean_length(entries: list[IppEntry]) -> float:
    """Count-weighted mean path length of one histogram.

    ``compute_dis(t, a, b) == mean_length(a) + mean_length(b) + t``, which
    is what lets ancestral scoring run on whole arrays at once.
    """
    total = sum(n for _, n in entries)
    return sum(l * n for l, n in entries) / total


def build_tables(ped: Pedigree) -> dict[int, IppTable]:
    """Tables for every non-extant individual of a complete pedigree."""
    tables: dict[int, IppTable] = {}
    for g in range(2, ped.height + 1):
        for anc in ped.generation(g):
            kids = ped.children(anc)
            if g == 2:
                tables[anc] = init_generation2(kids)
            else:
                tables[anc] = merge_increment(tables[k] for k in kids)
    return tables


def write_tables(tables: Mapping[int, IppTable], fh: TextIO) -> None:
    for anc in sorted(tables):
        for desc, entries in tables[anc].items():
            for length, count in entries:
                fh.write(f"{anc}\t{desc}\t{length}\t{count}\n")
