"""IBD-length tests between pairs of individuals.

IBD tract length between two haplotypes separated by ``M`` meioses is
modelled as exponential with rate ``M * r``, so a pair's score under a
hypothesis is the squared standardised deviation of the observed mean
tract length from ``1 / (M * r)``. Each hypothesis fixes the meiosis
offsets of the two haplotype pairs; the hypothesis with the lowest score
wins.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from pedrecon.ibd import DEFAULT_MIN_TRACT, PairingSummaries, pairing_summaries
from pedrecon.ipp import IppTable, compute_dis, mean_length
from pedrecon.simulator import DiploidGenome

DEFAULT_RECOMB_RATE = 1e-8


class RelationshipKind(enum.Enum):
    SIBLING = "sibling"
    HALF_SIBLING = "half_sibling"
    FIRST_COUSIN = "first_cousin"
    FIRST_HALF_COUSIN = "first_half_cousin"
    UNRELATED = "unrelated"


# (t1, t2): t1 goes to the haplotype pair with the longer mean tract
TEST_OFFSETS = {
    RelationshipKind.SIBLING: (2, 2),
    RelationshipKind.HALF_SIBLING: (2, 4),
    RelationshipKind.FIRST_COUSIN: (4, 4),
    RelationshipKind.FIRST_HALF_COUSIN: (4, 6),
}
ALL_KINDS = tuple(TEST_OFFSETS)
SIBLING_ONLY_KINDS = (RelationshipKind.SIBLING, RelationshipKind.FIRST_COUSIN)


class PairingRule(str, enum.Enum):
    TEXT = "text"  # pairing with the larger summed mean tract length
    EQ4 = "eq4"  # per hypothesis, the pairing with the larger summed score


@dataclass(frozen=True)
class MomentParams:
    meioses: float
    recomb_rate: float = DEFAULT_RECOMB_RATE

    def __post_init__(self):
        if not self.meioses > 0:
            raise ValueError(f"meioses must be positive, got {self.meioses}")
        if not self.recomb_rate > 0:
            raise ValueError(f"recomb_rate must be positive, got {self.recomb_rate}")

    @property
    def expected(self) -> float:
        return 1.0 / (self.meioses * self.recomb_rate)

    @property
    def variance(self) -> float:
        return 1.0 / (self.meioses * self.recomb_rate) ** 2


def component_score(estimate: float, moments: MomentParams) -> float:
    """``(estimate - E)^2 / var``, written as ``(estimate * M * r - 1)^2``."""
    if estimate < 0:
        raise ValueError("estimate must be non-negative")
    return (estimate * moments.meioses * moments.recomb_rate - 1.0) ** 2


def _scores(estimate, meioses, recomb_rate):
    # array form of component_score
    return (estimate * meioses * recomb_rate - 1.0) ** 2


@dataclass
class ScoreReport:
    scores: dict[RelationshipKind, float]
    chosen: RelationshipKind
    pairing: int | None = None

    @classmethod
    def unrelated(cls) -> "ScoreReport":
        return cls({}, RelationshipKind.UNRELATED, None)

    @classmethod
    def from_scores(cls, scores, pairings=None) -> "ScoreReport":
        # first minimum in hypothesis order
        chosen = min(scores, key=lambda k: scores[k])
        return cls(dict(scores), chosen, None if pairings is None else pairings[chosen])


def _pair_score(ps: PairingSummaries, m1: float, m2: float, r: float,
                rule: PairingRule) -> tuple[float, int]:
    if rule is PairingRule.TEXT:
        hi, lo = ps.estimates()
        return (_scores(hi, m1, r) + _scores(lo, m2, r)) / 2, ps.chosen
    best, best_p = -1.0, 0
    for p in (0, 1):
        hi, lo = ps.estimates(p)
        s = _scores(hi, m1, r) + _scores(lo, m2, r)
        if s > best:
            best, best_p = s, p
    return best / 2, best_p


def classify_extant_pair(i: DiploidGenome, j: DiploidGenome,
                         recomb_rate: float = DEFAULT_RECOMB_RATE,
                         min_tract: int = DEFAULT_MIN_TRACT,
                         rule: PairingRule = PairingRule.TEXT,
                         kinds: Sequence[RelationshipKind] = ALL_KINDS,
                         summaries: PairingSummaries | None = None) -> ScoreReport:
    """Score two extant individuals under each hypothesis in ``kinds``.

    At generation 1 the offsets are the full meiosis counts. Pairs with no
    IBD tract under either pairing are reported unrelated without scoring,
    since every hypothesis scores exactly 1 there.
    """
    rule = PairingRule(rule)
    ps = summaries if summaries is not None else pairing_summaries(i, j, min_tract)
    if not ps.has_ibd:
        return ScoreReport.unrelated()
    if not recomb_rate > 0:
        raise ValueError("recomb_rate must be positive")
    scores, pairings = {}, {}
    for kind in kinds:
        t1, t2 = TEST_OFFSETS[kind]
        scores[kind], pairings[kind] = _pair_score(ps, t1, t2, recomb_rate, rule)
    return ScoreReport.from_scores(scores, pairings)


class ExtantIbd:
    """Pairing summaries for every pair of extant genomes, computed once.

    Also exposes them as dense matrices indexed by position in ``ids``
    for the array form of the ancestral test.
    """

    def __init__(self, genomes: Mapping[int, DiploidGenome], min_tract: int = DEFAULT_MIN_TRACT):
        self.ids = sorted(genomes)
        self.index = {ind: pos for pos, ind in enumerate(self.ids)}
        n = len(self.ids)
        self._summaries: dict[tuple[int, int], PairingSummaries] = {}
        # [pairing, hi/lo]; pairing 2 is the text-rule choice
        self.estimates = np.zeros((3, 2, n, n))
        self.has_ibd = np.zeros((n, n), dtype=bool)
        for a, b in combinations(self.ids, 2):
            ps = pairing_summaries(genomes[a], genomes[b], min_tract)
            self._summaries[(a, b)] = ps
            ia, ib = self.index[a], self.index[b]
            for p in (0, 1):
                self.estimates[p, :, ia, ib] = self.estimates[p, :, ib, ia] = ps.estimates(p)
            self.estimates[2, :, ia, ib] = self.estimates[2, :, ib, ia] = ps.estimates()
            self.has_ibd[ia, ib] = self.has_ibd[ib, ia] = ps.has_ibd

    def __getitem__(self, pair: tuple[int, int]) -> PairingSummaries:
        a, b = pair
        if a == b:
            raise KeyError("no self pairs")
        return self._summaries[(a, b) if a < b else (b, a)]


def classify_ancestral_pair(ipp_k: IppTable, ipp_l: IppTable, ibd: ExtantIbd,
                            recomb_rate: float = DEFAULT_RECOMB_RATE,
                            rule: PairingRule = PairingRule.TEXT,
                            kinds: Sequence[RelationshipKind] = ALL_KINDS) -> ScoreReport:
    """Average per-descendant-pair scores for two ancestors ``k`` and ``l``.

    For descendants ``i`` of ``k`` and ``j`` of ``l`` the meiosis counts
    are the mean concatenated path lengths plus the hypothesis offsets.
    Pairs with ``i == j`` are left out of the average.
    """
    rule = PairingRule(rule)
    if not ipp_k or not ipp_l:
        raise ValueError("ancestors must have at least one extant descendant")
    pairs = [(i, j) for i in ipp_k for j in ipp_l if i != j]
    if not pairs or not any(ibd[i, j].has_ibd for i, j in pairs):
        return ScoreReport.unrelated()
    scores = {}
    for kind in kinds:
        t1, t2 = TEST_OFFSETS[kind]
        total = 0.0
        for i, j in pairs:
            m1 = compute_dis(t1, ipp_k[i], ipp_l[j])
            m2 = compute_dis(t2, ipp_k[i], ipp_l[j])
            total += _pair_score(ibd[i, j], m1, m2, recomb_rate, rule)[0]
        scores[kind] = total / len(pairs)
    return ScoreReport.from_scores(scores)


@dataclass
class AncestorProfile:
    """Descendant positions in :class:`ExtantIbd` and mean path lengths to them."""

    index: np.ndarray
    depth: np.ndarray = field(repr=False)

    @classmethod
    def from_table(cls, table: IppTable, ibd: ExtantIbd) -> "AncestorProfile":
        ids = sorted(table)
        return cls(np.array([ibd.index[i] for i in ids], dtype=int),
                   np.array([mean_length(table[i]) for i in ids]))


def classify_ancestral_fast(k: AncestorProfile, l: AncestorProfile, ibd: ExtantIbd,
                            recomb_rate: float = DEFAULT_RECOMB_RATE,
                            rule: PairingRule = PairingRule.TEXT,
                            kinds: Sequence[RelationshipKind] = ALL_KINDS) -> ScoreReport:
    """Array version of :func:`classify_ancestral_pair`; same result."""
    rule = PairingRule(rule)
    grid = np.ix_(k.index, l.index)
    mask = k.index[:, None] != l.index[None, :]
    n_pairs = mask.sum()
    if n_pairs == 0 or not ibd.has_ibd[grid][mask].any():
        return ScoreReport.unrelated()
    depth = k.depth[:, None] + l.depth[None, :]
    if rule is PairingRule.TEXT:
        planes = [(ibd.estimates[2, 0][grid], ibd.estimates[2, 1][grid])]
    else:
        planes = [(ibd.estimates[p, 0][grid], ibd.estimates[p, 1][grid]) for p in (0, 1)]
    scores = {}
    for kind in kinds:
        t1, t2 = TEST_OFFSETS[kind]
        per_plane = [_scores(hi, depth + t1, recomb_rate) + _scores(lo, depth + t2, recomb_rate)
                     for hi, lo in planes]
        v = np.maximum.reduce(per_plane) / 2
        scores[kind] = float(v[mask].sum() / n_pairs)
    return ScoreReport.from_scores(scores)
