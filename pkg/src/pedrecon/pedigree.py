"""Pedigree graph: individuals, parent links and path queries.

Generations are numbered backwards in time: extant individuals sit at
generation 1, their parents at generation 2, and so on.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

INFINITY = math.inf


class Sex(enum.Enum):
    MALE = "M"
    FEMALE = "F"
    UNKNOWN = "U"


@dataclass(frozen=True)
class Individual:
    id: int
    sex: Sex
    generation: int
    father: int | None = None
    mother: int | None = None

    @property
    def parents(self) -> tuple[int, ...]:
        return tuple(p for p in (self.father, self.mother) if p is not None)

    @property
    def is_founder(self) -> bool:
        return self.father is None and self.mother is None


class PedigreeError(ValueError):
    pass


class Pedigree:
    """A set of individuals keyed by id, with a derived parent -> children index.

    Individuals are added one at a time; parents must be added before their
    children, or attached later with :meth:`set_parents`. Once built, the
    object is only read.
    """

    def __init__(self, individuals: Iterable[Individual] = ()):
        self._individuals: dict[int, Individual] = {}
        self._children: dict[int, list[int]] = {}
        for ind in individuals:
            self.add(ind)

    def add(self, ind: Individual) -> None:
        if ind.id in self._individuals:
            raise PedigreeError(f"duplicate individual id {ind.id}")
        self._check(ind)
        self._individuals[ind.id] = ind
        self._children.setdefault(ind.id, [])
        for pid in ind.parents:
            self._children[pid].append(ind.id)

    def _check(self, ind: Individual) -> None:
        if ind.id <= 0:
            raise PedigreeError(f"individual ids must be positive, got {ind.id}")
        if (ind.father is None) != (ind.mother is None):
            raise PedigreeError(f"individual {ind.id} has exactly one recorded parent")
        if ind.generation < 1:
            raise PedigreeError(f"individual {ind.id} has generation {ind.generation}")
        if ind.father is not None:
            if ind.father == ind.mother:
                raise PedigreeError(f"individual {ind.id} has identical parents")
            for pid, expected in ((ind.father, Sex.MALE), (ind.mother, Sex.FEMALE)):
                parent = self._individuals.get(pid)
                if parent is None:
                    raise PedigreeError(f"parent {pid} of {ind.id} not in pedigree")
                if parent.generation != ind.generation + 1:
                    raise PedigreeError(
                        f"parent {pid} (generation {parent.generation}) of {ind.id} "
                        f"(generation {ind.generation}) is not one generation older"
                    )
                if parent.sex not in (expected, Sex.UNKNOWN):
                    raise PedigreeError(f"parent {pid} of {ind.id} has sex {parent.sex.value}")

    def set_parents(self, child: int, father: int, mother: int) -> None:
        """Attach parents to a founder; used when building a pedigree backwards in time."""
        ind = self[child]
        if not ind.is_founder:
            raise PedigreeError(f"individual {child} already has parents")
        updated = dataclasses.replace(ind, father=father, mother=mother)
        self._check(updated)
        self._individuals[child] = updated
        self._children[father].append(child)
        self._children[mother].append(child)

    def __len__(self) -> int:
        return len(self._individuals)

    def __contains__(self, item: int) -> bool:
        return item in self._individuals

    def __iter__(self) -> Iterator[Individual]:
        for key in sorted(self._individuals):
            yield self._individuals[key]

    def __getitem__(self, item: int) -> Individual:
        try:
            return self._individuals[item]
        except KeyError:
            raise KeyError(f"unknown individual id {item}") from None

    def ids(self) -> list[int]:
        return sorted(self._individuals)

    def children(self, ind: int) -> list[int]:
        self[ind]
        return list(self._children[ind])

    def parents(self, ind: int) -> tuple[int, ...]:
        return self[ind].parents

    def generation(self, g: int) -> list[int]:
        return sorted(i for i, ind in self._individuals.items() if ind.generation == g)

    @property
    def extant(self) -> list[int]:
        return self.generation(1)

    @property
    def height(self) -> int:
        return max((ind.generation for ind in self._individuals.values()), default=0)

    def neighbours(self, ind: int) -> list[int]:
        return list(self[ind].parents) + self._children[ind]

    def mates(self, ind: int) -> set[int]:
        """Individuals sharing at least one child with ``ind``."""
        out = set()
        for child in self.children(ind):
            out.update(self[child].parents)
        out.discard(ind)
        return out

    def validate(self) -> None:
        """Check the whole-graph invariants that ``add`` cannot see locally."""
        for ind in self._individuals.values():
            if ind.generation == 1:
                continue
            if not self._children[ind.id]:
                raise PedigreeError(f"non-extant individual {ind.id} has no children")
        # generation strictly increases along child -> parent edges, so no cycles

    def copy(self) -> "Pedigree":
        return Pedigree(self)


def shortest_distance(ped: Pedigree, i: int, j: int) -> float:
    """Undirected path length between ``i`` and ``j``; ``INFINITY`` if disconnected."""
    ped[i]
    ped[j]
    if i == j:
        return 0
    seen = {i: 0}
    queue = deque([i])
    while queue:
        node = queue.popleft()
        d = seen[node]
        for nb in ped.neighbours(node):
            if nb in seen:
                continue
            if nb == j:
                return d + 1
            seen[nb] = d + 1
            queue.append(nb)
    return INFINITY


def distances_from(ped: Pedigree, source: int) -> dict[int, int]:
    """Breadth-first distances from ``source`` to every reachable individual."""
    ped[source]
    seen = {source: 0}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for nb in ped.neighbours(node):
            if nb not in seen:
                seen[nb] = seen[node] + 1
                queue.append(nb)
    return seen


def extant_descendants(ped: Pedigree, k: int) -> set[int]:
    ind = ped[k]
    if ind.generation == 1:
        return {k}
    out: set[int] = set()
    stack = [k]
    seen = {k}
    while stack:
        node = stack.pop()
        for child in ped.children(node):
            if child in seen:
                continue
            seen.add(child)
            if ped[child].generation == 1:
                out.add(child)
            else:
                stack.append(child)
    return out


def enumerate_inheritance_paths(ped: Pedigree, ancestor: int, extant: int) -> list[list[int]]:
    """All child -> parent paths from ``extant`` up to ``ancestor``.

    Exponential in the worst case; meant as a brute-force reference.
    """
    target = ped[ancestor]
    paths: list[list[int]] = []

    def walk(path: list[int]) -> None:
        node = ped[path[-1]]
        if node.id == ancestor:
            paths.append(list(path))
            return
        if node.generation >= target.generation:
            return
        for parent in node.parents:
            path.append(parent)
            walk(path)
            path.pop()

    walk([extant])
    return paths


def write_pedigree(ped: Pedigree, fh: TextIO) -> None:
    for ind in ped:
        fh.write(
            f"{ind.id}\t{ind.sex.value}\t{ind.generation}\t{ind.father or 0}\t{ind.mother or 0}\n"
        )


def read_pedigree(fh: TextIO) -> Pedigree:
    rows = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise PedigreeError(f"line {lineno}: expected 5 tab-separated fields")
        try:
            ident, gen, father, mother = (int(fields[k]) for k in (0, 2, 3, 4))
            sex = Sex(fields[1])
        except ValueError as exc:
            raise PedigreeError(f"line {lineno}: {exc}") from None
        rows.append(Individual(ident, sex, gen, father or None, mother or None))
    # parents are older, so adding oldest first satisfies add()'s ordering rule
    rows.sort(key=lambda ind: (-ind.generation, ind.id))
    return Pedigree(rows)
