"""Generation-by-generation pedigree reconstruction.

Starting from extant genomes, each round classifies every pair in the
current generation, resolves the relationship graph, labels parents and
adds them as the next generation. Path-length tables of the new parents
are derived from their children's tables, so scoring older generations
never revisits the whole pedigree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping

from pedrecon.ibd import DEFAULT_MIN_TRACT
from pedrecon.ipp import IppTable, init_generation2, merge_increment
from pedrecon.pedigree import Individual, Pedigree, Sex
from pedrecon.relgraph import build_graph, create_parents, label, resolve
from pedrecon.simulator import DiploidGenome
from pedrecon.stats import (
    ALL_KINDS,
    DEFAULT_RECOMB_RATE,
    SIBLING_ONLY_KINDS,
    AncestorProfile,
    ExtantIbd,
    PairingRule,
    RelationshipKind,
    classify_ancestral_fast,
    classify_extant_pair,
)

log = logging.getLogger(__name__)

Relations = dict[tuple[int, int], RelationshipKind]
Classifier = Callable[[Pedigree, list[int], int], Relations]


@dataclass(frozen=True)
class ReconstructConfig:
    max_height: int = 5
    recomb_rate: float = DEFAULT_RECOMB_RATE
    min_tract_length: int = DEFAULT_MIN_TRACT
    pairing_rule: PairingRule = PairingRule.TEXT
    sibling_only: bool = False
    # every tie is broken by id, so nothing is random yet
    seed: int = 0

    def __post_init__(self):
        if self.max_height < 2:
            raise ValueError("max_height must be at least 2")
        object.__setattr__(self, "pairing_rule", PairingRule(self.pairing_rule))

    @property
    def kinds(self):
        return SIBLING_ONLY_KINDS if self.sibling_only else ALL_KINDS


@dataclass
class Reconstruction:
    pedigree: Pedigree
    tables: dict[int, IppTable]
    trace: list[dict] = field(default_factory=list)


class StatisticalClassifier:
    """IBD-based pairwise calls for one reconstruction run."""

    def __init__(self, extant: Mapping[int, DiploidGenome], cfg: ReconstructConfig):
        self.cfg = cfg
        self.ibd = ExtantIbd(extant, cfg.min_tract_length)
        self.tables: dict[int, IppTable] = {}

    def __call__(self, ped: Pedigree, ids: list[int], generation: int) -> Relations:
        cfg = self.cfg
        out: Relations = {}
        if generation == 1:
            for a, b in combinations(ids, 2):
                report = classify_extant_pair(None, None, cfg.recomb_rate, cfg.min_tract_length,
                                              cfg.pairing_rule, cfg.kinds, summaries=self.ibd[a, b])
                out[(a, b)] = report.chosen
            return out

        profiles = {i: AncestorProfile.from_table(self.tables[i], self.ibd) for i in ids}
        mates = {i: ped.mates(i) for i in ids}
        descendants = {i: frozenset(self.tables[i]) for i in ids}
        for a, b in combinations(ids, 2):
            # co-parents are partners, not candidate siblings
            if b in mates[a] or descendants[a] == descendants[b]:
                continue
            report = classify_ancestral_fast(profiles[a], profiles[b], self.ibd,
                                             cfg.recomb_rate, cfg.pairing_rule, cfg.kinds)
            out[(a, b)] = report.chosen
        return out


def reconstruct(extant: Mapping[int, DiploidGenome], cfg: ReconstructConfig | None = None,
                classifier: Classifier | None = None) -> Reconstruction:
    """Rebuild a pedigree of height ``cfg.max_height`` above the extant genomes.

    ``classifier`` replaces the IBD tests; it receives the pedigree built so
    far, the ids of the current generation and the generation number.
    """
    cfg = cfg or ReconstructConfig()
    if len(extant) < 2:
        raise ValueError("need at least two extant individuals")
    ped = Pedigree(Individual(i, Sex.UNKNOWN, 1) for i in sorted(extant))
    stat = None
    if classifier is None:
        stat = classifier = StatisticalClassifier(extant, cfg)
    tables: dict[int, IppTable] = {}
    trace = []
    next_label = max(extant) + 1
    current = sorted(extant)

    for g in range(1, cfg.max_height):
        relations = classifier(ped, current, g)
        graph = build_graph(current, relations)
        res = resolve(graph)
        labeling = label(res.virtual, next_label)
        parents, parent_of = create_parents(labeling, g)
        for p in parents:
            ped.add(p)
        for child, (father, mother) in parent_of.items():
            ped.set_parents(child, father, mother)
        for p in parents:
            kids = ped.children(p.id)
            if g == 1:
                tables[p.id] = init_generation2(kids)
            else:
                tables[p.id] = merge_increment(tables[k] for k in kids)
        if stat is not None:
            stat.tables = tables

        next_label = max(labeling.distinct(), default=next_label - 1) + 1
        trace.append({
            "generation": g,
            "individuals": len(current),
            "pairing_rule": cfg.pairing_rule.value,
            "sibling_only": cfg.sibling_only,
            "edges_before": [[a, b, k.value] for a, b, k in graph.edges()],
            "edges_after": [[a, b, k.value] for a, b, k in res.graph.edges()],
            "deletions": [[d.a, d.b, d.kind.value, d.reason] for d in res.deletions],
            "labels": {str(c): list(pair) for c, pair in sorted(labeling.labels.items())},
        })
        log.debug("generation %d: %d individuals, %d edges, %d deletions, %d parents",
                  g, len(current), len(graph), len(res.deletions), len(parents))
        current = sorted(p.id for p in parents)

    return Reconstruction(ped, tables, trace)


class TruthClassifier:
    """Reports the true sibling / half-sibling relationships of a known pedigree.

    Reconstructed individuals are matched to true ones by their children:
    a new parent maps to the unmatched true individual whose children are
    exactly the images of its own. Unmatched individuals get no relations.
    """

    def __init__(self, truth: Pedigree):
        self.truth = truth
        self.mapping: dict[int, int] = {}

    def __call__(self, ped: Pedigree, ids: list[int], generation: int) -> Relations:
        if generation == 1:
            self.mapping = {i: i for i in ids}
        else:
            self._extend(ped, ids, generation)
        out: Relations = {}
        for a, b in combinations(ids, 2):
            ta, tb = self.mapping.get(a), self.mapping.get(b)
            if ta is None or tb is None:
                continue
            shared = len(set(self.truth[ta].parents) & set(self.truth[tb].parents))
            if shared == 2:
                out[(a, b)] = RelationshipKind.SIBLING
            elif shared == 1:
                out[(a, b)] = RelationshipKind.HALF_SIBLING
        return out

    def _extend(self, ped: Pedigree, ids: list[int], generation: int) -> None:
        taken = set(self.mapping.values())
        by_children: dict[frozenset, list[int]] = {}
        for t in self.truth.generation(generation):
            by_children.setdefault(frozenset(self.truth.children(t)), []).append(t)
        for x in ids:
            kids = ped.children(x)
            if not all(k in self.mapping for k in kids):
                continue
            key = frozenset(self.mapping[k] for k in kids)
            for t in by_children.get(key, []):
                if t not in taken:
                    self.mapping[x] = t
                    taken.add(t)
                    break
