"""Relationship graphs and parent labelling for one generation.

Pairwise calls become sibling and half-sibling edges. Conflicts are then
removed by edge deletion only: sibling-connected components are cut into
cliques greedily (largest first), and half-sibling edges between two
sibling cliques survive only when they connect the cliques completely.
Each sibling clique collapses to a virtual node; maximal cliques of the
resulting half-sibling graph name the shared parents.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Mapping, TextIO

from pedrecon.pedigree import Individual, Sex
from pedrecon.stats import RelationshipKind

log = logging.getLogger(__name__)


class EdgeKind(enum.Enum):
    SIBLING = "sibling"
    HALF_SIBLING = "half_sibling"


@dataclass(frozen=True)
class Deletion:
    a: int
    b: int
    kind: EdgeKind
    reason: str


class RelationshipGraph:
    def __init__(self, nodes: Iterable[int] = (), edges: Iterable[tuple[int, int, EdgeKind]] = ()):
        self.nodes: list[int] = sorted(set(nodes))
        self._node_set = set(self.nodes)
        self._edges: dict[tuple[int, int], EdgeKind] = {}
        for a, b, kind in edges:
            self.add_edge(a, b, kind)

    @staticmethod
    def _key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def add_edge(self, a: int, b: int, kind: EdgeKind) -> None:
        if a == b:
            raise ValueError("self edges are not allowed")
        if a not in self._node_set or b not in self._node_set:
            raise ValueError(f"edge ({a}, {b}) has an endpoint outside the graph")
        self._edges[self._key(a, b)] = EdgeKind(kind)

    def remove_edge(self, a: int, b: int) -> EdgeKind:
        return self._edges.pop(self._key(a, b))

    def kind(self, a: int, b: int) -> EdgeKind | None:
        return self._edges.get(self._key(a, b))

    def edges(self, kind: EdgeKind | None = None) -> list[tuple[int, int, EdgeKind]]:
        return [(a, b, k) for (a, b), k in sorted(self._edges.items()) if kind is None or k is kind]

    def adjacency(self, kind: EdgeKind) -> dict[int, set[int]]:
        adj = {v: set() for v in self.nodes}
        for (a, b), k in self._edges.items():
            if k is kind:
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def __len__(self) -> int:
        return len(self._edges)

    def copy(self) -> "RelationshipGraph":
        g = RelationshipGraph(self.nodes)
        g._edges = dict(self._edges)
        return g

    def write(self, fh: TextIO) -> None:
        for a, b, kind in self.edges():
            fh.write(f"{a}\t{b}\t{kind.value}\n")


def build_graph(nodes: Iterable[int],
                relations: Mapping[tuple[int, int], RelationshipKind]) -> RelationshipGraph:
    g = RelationshipGraph(nodes)
    for (a, b), rel in relations.items():
        if rel is RelationshipKind.SIBLING:
            g.add_edge(a, b, EdgeKind.SIBLING)
        elif rel is RelationshipKind.HALF_SIBLING:
            g.add_edge(a, b, EdgeKind.HALF_SIBLING)
    return g


def bron_kerbosch(adj: Mapping[Hashable, set]) -> list[frozenset]:
    """All maximal cliques (singletons included), Tomita pivoting."""
    cliques: list[frozenset] = []

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            cliques.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(adj[u] & p))
        for v in list(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand(set(), set(adj), set())
    return cliques


def _clique_rank(clique) -> tuple:
    # bigger first, then lexicographically smallest member list
    return (-len(clique), sorted(clique))


def maximum_clique(adj: Mapping[int, set[int]]) -> frozenset:
    """Largest clique, ties to the lexicographically smallest member list."""
    best = None
    for component in _components(adj):
        sub = {v: adj[v] & component for v in component}
        for clique in bron_kerbosch(sub):
            if best is None or _clique_rank(clique) < _clique_rank(best):
                best = clique
    return best if best is not None else frozenset()


def _components(adj: Mapping[int, set[int]]) -> list[set[int]]:
    seen: set[int] = set()
    out = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            for nb in adj[queue.popleft()]:
                if nb not in comp:
                    comp.add(nb)
                    queue.append(nb)
        seen |= comp
        out.append(comp)
    return out


def resolve_sibling_conflicts(g: RelationshipGraph,
                              deletions: list[Deletion] | None = None
                              ) -> tuple[RelationshipGraph, list[tuple[int, ...]]]:
    """Partition nodes into sibling cliques by repeatedly taking a maximum clique.

    Sibling edges between different cliques are deleted. Returns the new
    graph and the cliques (singletons included), ordered by smallest member.
    """
    g = g.copy()
    adj = g.adjacency(EdgeKind.SIBLING)
    cliques = []
    for component in _components(adj):
        remaining = set(component)
        while remaining:
            sub = {v: adj[v] & remaining for v in remaining}
            best = maximum_clique(sub)
            cliques.append(tuple(sorted(best)))
            remaining -= best
    cliques.sort()
    owner = {v: pos for pos, clique in enumerate(cliques) for v in clique}
    for a, b, kind in g.edges(EdgeKind.SIBLING):
        if owner[a] != owner[b]:
            g.remove_edge(a, b)
            if deletions is not None:
                deletions.append(Deletion(a, b, kind, "sibling-conflict"))
    return g, cliques


def resolve_half_sibling_conflicts(g: RelationshipGraph, cliques: list[tuple[int, ...]],
                                   deletions: list[Deletion] | None = None) -> RelationshipGraph:
    """Keep half-sibling edges only where they join two sibling cliques completely."""
    g = g.copy()
    owner = {v: pos for pos, clique in enumerate(cliques) for v in clique}
    between: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    doomed = []
    for a, b, _ in g.edges(EdgeKind.HALF_SIBLING):
        ca, cb = owner[a], owner[b]
        if ca == cb:
            doomed.append((a, b))
        else:
            between[(min(ca, cb), max(ca, cb))].append((a, b))
    for (ca, cb), pairs in sorted(between.items()):
        if len(pairs) != len(cliques[ca]) * len(cliques[cb]):
            doomed.extend(pairs)
    for a, b in sorted(doomed):
        g.remove_edge(a, b)
        if deletions is not None:
            deletions.append(Deletion(a, b, EdgeKind.HALF_SIBLING, "half-sibling-conflict"))
    return g


@dataclass
class VirtualGraph:
    """One node per sibling clique (indexed by position), half-sibling edges between them."""

    cliques: list[tuple[int, ...]]
    adj: dict[int, set[int]]

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def copy(self) -> "VirtualGraph":
        return VirtualGraph(list(self.cliques), {u: set(n) for u, n in self.adj.items()})


def build_virtual_graph(g: RelationshipGraph, cliques: list[tuple[int, ...]]) -> VirtualGraph:
    owner = {v: pos for pos, clique in enumerate(cliques) for v in clique}
    counts: Counter = Counter()
    for a, b, kind in g.edges():
        ca, cb = owner[a], owner[b]
        if kind is EdgeKind.SIBLING:
            if ca != cb:
                raise ValueError(f"sibling edge ({a}, {b}) crosses sibling cliques")
            continue
        if ca == cb:
            raise ValueError(f"half-sibling edge ({a}, {b}) inside a sibling clique")
        counts[(min(ca, cb), max(ca, cb))] += 1
    adj = {pos: set() for pos in range(len(cliques))}
    for (ca, cb), n in counts.items():
        if n != len(cliques[ca]) * len(cliques[cb]):
            raise ValueError(f"sibling cliques {cliques[ca]} and {cliques[cb]} are partially joined")
        adj[ca].add(cb)
        adj[cb].add(ca)
    return VirtualGraph(list(cliques), adj)


def maximal_cliques(vg: VirtualGraph) -> tuple[list[tuple[int, ...]], list[int]]:
    """Maximal cliques of size >= 2 (sorted), and the isolated virtual nodes."""
    found = bron_kerbosch(vg.adj)
    cliques = sorted(tuple(sorted(c)) for c in found if len(c) >= 2)
    isolated = sorted(v for v in vg.adj if not vg.adj[v])
    return cliques, isolated


def prune_virtual_graph(vg: VirtualGraph) -> tuple[VirtualGraph, list[tuple[int, int, str]]]:
    """Delete virtual edges until the maximal cliques can label the graph.

    Two conditions are enforced: no virtual node lies in more than two
    maximal cliques, and no edge lies in more than one. A node in three or
    more keeps the two largest and drops its edges towards the rest; an
    edge shared by two cliques is split off the second one, which keeps
    only its smallest shared node.
    """
    vg = vg.copy()
    removed: list[tuple[int, int, str]] = []

    def drop(u: int, v: int, reason: str) -> None:
        vg.adj[u].discard(v)
        vg.adj[v].discard(u)
        removed.append((min(u, v), max(u, v), reason))

    while True:
        cliques, _ = maximal_cliques(vg)
        member = defaultdict(list)
        for c in cliques:
            for v in c:
                member[v].append(c)

        crowded = sorted(v for v, cs in member.items() if len(cs) >= 3)
        if crowded:
            v = crowded[0]
            ranked = sorted(member[v], key=_clique_rank)
            keep = ranked[:2]
            kept = set(keep[0]) | set(keep[1])
            before = len(removed)
            for c in ranked[2:]:
                for u in sorted(set(c) - kept):
                    if u in vg.adj[v]:
                        drop(v, u, "clique-membership-pruning")
            if len(removed) == before:
                # every dropped clique lies inside the kept union; cut its cross edges
                for c in ranked[2:]:
                    for a, b in combinations(c, 2):
                        inside = any(a in k and b in k for k in keep)
                        if not inside and b in vg.adj[a]:
                            drop(a, b, "clique-membership-pruning")
            log.info("virtual node %d was in %d maximal cliques", v, len(ranked))
            continue

        edge_use: Counter = Counter()
        for c in cliques:
            edge_use.update(combinations(c, 2))
        shared = sorted(e for e, n in edge_use.items() if n >= 2)
        if shared:
            a, b = shared[0]
            holders = sorted((c for c in cliques if a in c and b in c), key=_clique_rank)
            c1, c2 = set(holders[0]), set(holders[1])
            common, rest = c1 & c2, c2 - c1
            anchor = min(common)
            for t in sorted(rest):
                for s in sorted(common - {anchor}):
                    drop(t, s, "shared-edge-pruning")
            continue
        return vg, removed


@dataclass
class Resolution:
    graph: RelationshipGraph
    cliques: list[tuple[int, ...]]
    virtual: VirtualGraph
    deletions: list[Deletion] = field(default_factory=list)


def resolve(g: RelationshipGraph) -> Resolution:
    """Run every conflict-removal pass; the result can always be labelled."""
    deletions: list[Deletion] = []
    g1, cliques = resolve_sibling_conflicts(g, deletions)
    g2 = resolve_half_sibling_conflicts(g1, cliques, deletions)
    vg, removed = prune_virtual_graph(build_virtual_graph(g2, cliques))
    for u, v, reason in removed:
        for a in cliques[u]:
            for b in cliques[v]:
                g2.remove_edge(a, b)
                deletions.append(Deletion(min(a, b), max(a, b), EdgeKind.HALF_SIBLING, reason))
    return Resolution(g2, cliques, vg, deletions)


@dataclass
class Labeling:
    labels: dict[int, tuple[int, int]]
    clique_labels: dict[tuple[int, ...], int] = field(default_factory=dict)

    def distinct(self) -> list[int]:
        return sorted({lab for pair in self.labels.values() for lab in pair})


def label(vg: VirtualGraph, first_label: int = 1) -> Labeling:
    """Assign two parent labels to every member of every sibling clique.

    Each maximal half-sibling clique gets one shared label. A virtual node
    in one clique adds a fresh label of its own, a node in two cliques takes
    both clique labels, and an isolated node gets two fresh labels.
    """
    vg, removed = prune_virtual_graph(vg)
    if removed:
        log.warning("labelling pruned %d virtual edges", len(removed))
    cliques, _ = maximal_cliques(vg)
    counter = first_label

    def fresh() -> int:
        nonlocal counter
        counter += 1
        return counter - 1

    clique_labels = {c: fresh() for c in cliques}
    member = defaultdict(list)
    for c in cliques:
        for v in c:
            member[v].append(clique_labels[c])

    labels = {}
    for v in range(len(vg.cliques)):
        shared = member.get(v, [])
        if len(shared) == 0:
            pair = (fresh(), fresh())
        elif len(shared) == 1:
            pair = (shared[0], fresh())
        else:
            pair = (shared[0], shared[1])
        for ind in vg.cliques[v]:
            labels[ind] = pair
    return Labeling(labels, {tuple(vg.cliques[i] for i in c): lab for c, lab in clique_labels.items()})


def create_parents(labeling: Labeling, generation: int
                   ) -> tuple[list[Individual], dict[int, tuple[int, int]]]:
    """One new individual per label at ``generation + 1``, plus each child's (father, mother).

    Sexes come from 2-colouring the graph of labels that share a child;
    components that cannot be 2-coloured get unknown sex.
    """
    mates: dict[int, set[int]] = defaultdict(set)
    for a, b in labeling.labels.values():
        mates[a].add(b)
        mates[b].add(a)

    sex: dict[int, Sex] = {}
    for start in sorted(mates):
        if start in sex:
            continue
        colour = {start: 0}
        queue = deque([start])
        ok = True
        while queue:
            u = queue.popleft()
            for w in mates[u]:
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    queue.append(w)
                elif colour[w] == colour[u]:
                    ok = False
        for u, c in colour.items():
            sex[u] = (Sex.MALE if c == 0 else Sex.FEMALE) if ok else Sex.UNKNOWN

    parents = [Individual(lab, sex[lab], generation + 1) for lab in sorted(sex)]
    parent_of = {}
    for child, (a, b) in sorted(labeling.labels.items()):
        if sex[a] is Sex.FEMALE or sex[b] is Sex.MALE:
            a, b = b, a
        elif sex[a] is Sex.UNKNOWN and a > b:
            a, b = b, a
        parent_of[child] = (a, b)
    return parents, parent_of
