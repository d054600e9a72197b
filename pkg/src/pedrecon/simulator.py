"""Forward-in-time Wright-Fisher pedigrees and gene dropping.

Pedigrees are grown from a founder generation with monogamous couples and,
at a configurable rate, triples in which one individual mates with two
partners (the source of half-siblings). Haplotypes are then dropped down
the pedigree as lists of founder-allele segments so that IBD is exact.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, TextIO

import numpy as np

from pedrecon.pedigree import Individual, Pedigree, Sex


@dataclass(frozen=True)
class SimParams:
    avg_children: float
    pop_size: int
    half_sibling_rate: float
    height: int
    genome_length: int = 100_000_000
    recomb_rate: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not self.avg_children > 0:
            raise ValueError("avg_children must be positive")
        if self.pop_size < 2:
            raise ValueError("pop_size must be at least 2")
        if not 0.0 <= self.half_sibling_rate <= 1.0:
            raise ValueError("half_sibling_rate must lie in [0, 1]")
        if self.height < 2:
            raise ValueError("height must be at least 2")
        if self.genome_length <= 0:
            raise ValueError("genome_length must be positive")
        if not self.recomb_rate > 0:
            raise ValueError("recomb_rate must be positive")


# rows of the published parameter table
PARAMETER_SETS = {
    1: dict(avg_children=3, pop_size=20, half_sibling_rate=0.0, height=5),
    2: dict(avg_children=2, pop_size=20, half_sibling_rate=0.8, height=5),
    3: dict(avg_children=3, pop_size=40, half_sibling_rate=0.5, height=5),
    4: dict(avg_children=3, pop_size=20, half_sibling_rate=0.8, height=10),
    5: dict(avg_children=3, pop_size=40, half_sibling_rate=0.8, height=10),
}

_REQUIRED_KEYS = ("avg_children", "pop_size", "half_sibling_rate", "height", "genome_length")
_CASTS = {
    "avg_children": float,
    "pop_size": int,
    "half_sibling_rate": float,
    "height": int,
    "genome_length": lambda s: int(float(s)),
    "recomb_rate": float,
    "seed": int,
}


def read_params(fh: TextIO) -> SimParams:
    """Parse a flat ``key=value`` file into :class:`SimParams`."""
    values = {}
    for lineno, line in enumerate(fh, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _CASTS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CASTS[key](raw)
        except ValueError:
            raise ValueError(f"line {lineno}: bad value for {key}: {raw!r}") from None
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ValueError(f"missing required keys: {', '.join(missing)}")
    return SimParams(**values)


def write_params(params: SimParams, fh: TextIO) -> None:
    for field in dataclasses.fields(params):
        fh.write(f"{field.name}={getattr(params, field.name)}\n")


class Segment(NamedTuple):
    start: int
    end: int
    allele: int


class Haplotype:
    """Founder-allele segments tiling ``[0, length)``, canonical (no equal neighbours)."""

    __slots__ = ("segments", "length")

    def __init__(self, segments, length: int):
        merged: list[Segment] = []
        for seg in segments:
            seg = Segment(*seg)
            if merged and merged[-1].allele == seg.allele and merged[-1].end == seg.start:
                merged[-1] = Segment(merged[-1].start, seg.end, seg.allele)
            else:
                merged.append(seg)
        pos = 0
        for seg in merged:
            if seg.start != pos or seg.end <= seg.start:
                raise ValueError(f"segments do not tile the genome at {pos}")
            pos = seg.end
        if pos != length:
            raise ValueError(f"segments end at {pos}, expected {length}")
        self.segments = tuple(merged)
        self.length = length

    @classmethod
    def founder(cls, allele: int, length: int) -> "Haplotype":
        return cls([Segment(0, length, allele)], length)

    def allele_at(self, pos: int) -> int:
        if not 0 <= pos < self.length:
            raise IndexError(pos)
        lo, hi = 0, len(self.segments)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.segments[mid].start <= pos:
                lo = mid
            else:
                hi = mid
        return self.segments[lo].allele

    def slice(self, start: int, end: int) -> list[Segment]:
        out = []
        for seg in self.segments:
            if seg.end <= start:
                continue
            if seg.start >= end:
                break
            out.append(Segment(max(seg.start, start), min(seg.end, end), seg.allele))
        return out

    def breakpoints(self) -> list[int]:
        return [seg.start for seg in self.segments[1:]]

    def __eq__(self, other):
        if not isinstance(other, Haplotype):
            return NotImplemented
        return self.length == other.length and self.segments == other.segments

    def __hash__(self):
        return hash((self.length, self.segments))

    def __repr__(self):
        return f"Haplotype({list(self.segments)!r}, {self.length})"


class DiploidGenome(NamedTuple):
    hap1: Haplotype  # paternal
    hap2: Haplotype  # maternal


def _crossover_points(length: int, k: int, rng: np.random.Generator) -> list[int]:
    points: set[int] = set()
    while len(points) < k:
        x = int(round(rng.uniform(0, length)))
        if 0 < x < length:
            points.add(x)
    return sorted(points)


def meiosis(parent: DiploidGenome, params: SimParams, rng: np.random.Generator,
            crossovers: list[int] | None = None) -> Haplotype:
    """Transmit one recombinant haplotype from ``parent``.

    ``crossovers`` overrides the sampled crossover positions; the starting
    haplotype is still drawn from ``rng``.
    """
    length = parent.hap1.length
    if crossovers is None:
        k = rng.poisson(length * params.recomb_rate)
        crossovers = _crossover_points(length, k, rng)
    source = int(rng.integers(2))
    bounds = [0, *crossovers, length]
    segments: list[Segment] = []
    for start, end in zip(bounds, bounds[1:]):
        segments.extend(parent[source].slice(start, end))
        source = 1 - source
    return Haplotype(segments, length)


@dataclass
class SimulatedPedigree:
    pedigree: Pedigree
    sibling_pairs: list[tuple[int, int]]
    half_sibling_pairs: list[tuple[int, int]]
    params: SimParams


def simulate_pedigree(params: SimParams, rng: np.random.Generator) -> SimulatedPedigree:
    """Grow a Wright-Fisher pedigree of ``params.height`` generations.

    The result is pruned to the ancestors of the last (extant) generation
    and renumbered by creation order starting at 1.
    """
    next_id = 0
    sexes: dict[int, Sex] = {}
    parents_of: dict[int, tuple[int, int]] = {}

    def new_generation(size: int) -> list[int]:
        nonlocal next_id
        ids = list(range(next_id, next_id + size))
        next_id += size
        for pos, ind in enumerate(ids):
            sexes[ind] = Sex.MALE if pos % 2 == 0 else Sex.FEMALE
        return ids

    generations = [new_generation(params.pop_size)]
    for _ in range(params.height - 1):
        current = generations[-1]
        families = _mate_and_reproduce(current, sexes, params, rng)
        children = new_generation(len(families))
        for child, (father, mother) in zip(children, families):
            parents_of[child] = (father, mother)
        generations.append(children)

    # keep only ancestors of the extant generation
    keep = set(generations[-1])
    frontier = list(keep)
    while frontier:
        ind = frontier.pop()
        for p in parents_of.get(ind, ()):
            if p not in keep:
                keep.add(p)
                frontier.append(p)

    renumber: dict[int, int] = {}
    ped = Pedigree()
    for depth, gen in enumerate(generations):
        generation = params.height - depth
        for old in gen:
            if old not in keep:
                continue
            renumber[old] = len(renumber) + 1
            father = mother = None
            if old in parents_of:
                father, mother = (renumber[p] for p in parents_of[old])
            ped.add(Individual(renumber[old], sexes[old], generation, father, mother))

    sibs, half_sibs = relationship_pairs(ped)
    return SimulatedPedigree(ped, sibs, half_sibs, params)


def _mate_and_reproduce(current, sexes, params, rng) -> list[tuple[int, int]]:
    """Return one (father, mother) tuple per child of the next generation."""
    males = [i for i in current if sexes[i] is Sex.MALE]
    females = [i for i in current if sexes[i] is Sex.FEMALE]
    rng.shuffle(males)
    rng.shuffle(females)
    matings: list[tuple[int, int]] = []
    families: list[tuple[int, int]] = []
    revisit = 0
    target = params.pop_size

    while len(families) < target:
        group: list[tuple[int, int]] = []
        if males and females:
            if rng.random() < params.half_sibling_rate:
                options = []
                if len(females) >= 2:
                    options.append("male")
                if len(males) >= 2:
                    options.append("female")
                if options:
                    shared = options[int(rng.integers(len(options)))]
                    if shared == "male":
                        m = males.pop()
                        group = [(m, females.pop()), (m, females.pop())]
                    else:
                        f = females.pop()
                        group = [(males.pop(), f), (males.pop(), f)]
            if not group:
                group = [(males.pop(), females.pop())]
            matings.extend(group)
        else:
            # everyone is mated; existing couples keep having children
            group = [matings[revisit % len(matings)]]
            revisit += 1
        for couple in group:
            n = int(rng.poisson(params.avg_children))
            n = min(n, target - len(families))
            families.extend([couple] * n)
    return families


def relationship_pairs(ped: Pedigree) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Full-sibling and half-sibling pairs at every generation of ``ped``."""
    sibs, half = [], []
    for g in range(1, ped.height + 1):
        members = [i for i in ped.generation(g) if not ped[i].is_founder]
        for a, b in combinations(members, 2):
            shared = len(set(ped[a].parents) & set(ped[b].parents))
            if shared == 2:
                sibs.append((a, b))
            elif shared == 1:
                half.append((a, b))
    return sibs, half


def gene_drop(ped: Pedigree, params: SimParams, rng: np.random.Generator) -> dict[int, DiploidGenome]:
    """Drop founder-labelled haplotypes through ``ped``; returns every individual's genome."""
    genomes: dict[int, DiploidGenome] = {}
    next_allele = 0
    order = sorted(ped, key=lambda ind: (-ind.generation, ind.id))
    for ind in order:
        if ind.is_founder:
            genomes[ind.id] = DiploidGenome(
                Haplotype.founder(next_allele, params.genome_length),
                Haplotype.founder(next_allele + 1, params.genome_length),
            )
            next_allele += 2
            continue
        try:
            father, mother = genomes[ind.father], genomes[ind.mother]
        except KeyError:
            raise ValueError(f"parent genome missing for individual {ind.id}") from None
        genomes[ind.id] = DiploidGenome(meiosis(father, params, rng), meiosis(mother, params, rng))
    return genomes


def simulate(params: SimParams) -> tuple[SimulatedPedigree, dict[int, DiploidGenome]]:
    """Pedigree plus extant genomes from ``params.seed``."""
    rng = np.random.default_rng(params.seed)
    sim = simulate_pedigree(params, rng)
    genomes = gene_drop(sim.pedigree, params, rng)
    extant = {i: genomes[i] for i in sim.pedigree.extant}
    return sim, extant


def write_haplotypes(genomes: dict[int, DiploidGenome], fh: TextIO) -> None:
    for ind in sorted(genomes):
        for index, hap in enumerate(genomes[ind], 1):
            for seg in hap.segments:
                fh.write(f"{ind}\t{index}\t{seg.start}\t{seg.end}\t{seg.allele}\n")


def read_haplotypes(fh: TextIO) -> dict[int, DiploidGenome]:
    rows: dict[tuple[int, int], list[Segment]] = {}
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise ValueError(f"line {lineno}: expected 5 tab-separated fields")
        try:
            ind, index, start, end, allele = map(int, fields)
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field") from None
        if index not in (1, 2):
            raise ValueError(f"line {lineno}: haplotype index must be 1 or 2")
        rows.setdefault((ind, index), []).append(Segment(start, end, allele))

    genomes = {}
    for ind in sorted({key[0] for key in rows}):
        if (ind, 1) not in rows or (ind, 2) not in rows:
            raise ValueError(f"individual {ind} lacks one of its haplotypes")
        haps = []
        for index in (1, 2):
            segs = sorted(rows[(ind, index)])
            haps.append(Haplotype(segs, segs[-1].end))
        if haps[0].length != haps[1].length:
            raise ValueError(f"individual {ind} haplotypes differ in length")
        genomes[ind] = DiploidGenome(*haps)
    return genomes


def write_truth(sim: SimulatedPedigree, fh: TextIO) -> None:
    for a, b in sim.sibling_pairs:
        fh.write(f"{a}\t{b}\tsibling\n")
    for a, b in sim.half_sibling_pairs:
        fh.write(f"{a}\t{b}\thalf_sibling\n")


def read_truth(fh: TextIO) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    sibs, half = [], []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        a, b, kind = line.split("\t")
        (sibs if kind == "sibling" else half).append((int(a), int(b)))
    return sibs, half
