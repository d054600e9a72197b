"""IBD tracts between founder-allele haplotypes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, TextIO

from pedrecon.simulator import DiploidGenome, Haplotype

DEFAULT_MIN_TRACT = 1_000_000


class IbdTract(NamedTuple):
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class IbdSummary:
    tracts: tuple[IbdTract, ...]

    @property
    def count(self) -> int:
        return len(self.tracts)

    @property
    def total_length(self) -> float:
        return float(sum(t.length for t in self.tracts))

    @property
    def average_length(self) -> float:
        return self.total_length / self.count if self.tracts else 0.0


def ibd_tracts(a: Haplotype, b: Haplotype, min_tract_length: int = DEFAULT_MIN_TRACT) -> IbdSummary:
    """Maximal intervals over which ``a`` and ``b`` carry identical founder alleles.

    A tract may span several founder alleles: when both haplotypes switch
    allele at the same position they copied that switch from a common
    ancestor, and the sharing continues. Intervals shorter than
    ``min_tract_length`` are dropped.
    """
    if a.length != b.length:
        raise ValueError(f"haplotype lengths differ: {a.length} != {b.length}")
    if min_tract_length <= 0:
        raise ValueError("min_tract_length must be positive")
    runs: list[list[int]] = []
    segs_a, segs_b = a.segments, b.segments
    i = j = 0
    while i < len(segs_a) and j < len(segs_b):
        sa, sb = segs_a[i], segs_b[j]
        lo, hi = max(sa.start, sb.start), min(sa.end, sb.end)
        if sa.allele == sb.allele:
            if runs and runs[-1][1] == lo:
                runs[-1][1] = hi
            else:
                runs.append([lo, hi])
        if sa.end <= sb.end:
            i += 1
        if sb.end <= sa.end:
            j += 1
    return IbdSummary(tuple(IbdTract(lo, hi) for lo, hi in runs if hi - lo >= min_tract_length))


@dataclass(frozen=True)
class PairingSummaries:
    """IBD summaries for both ways of matching two diploid genomes.

    ``pairings[0]`` is ``[(i1, j1), (i2, j2)]`` and ``pairings[1]`` is
    ``[(i1, j2), (i2, j1)]``.
    """

    pairings: tuple[tuple[IbdSummary, IbdSummary], tuple[IbdSummary, IbdSummary]]
    chosen: int

    def sums(self) -> tuple[float, float]:
        return tuple(x.average_length + y.average_length for x, y in self.pairings)

    def estimates(self, pairing: int | None = None) -> tuple[float, float]:
        """Average tract lengths of one pairing, larger first."""
        x, y = self.pairings[self.chosen if pairing is None else pairing]
        hi, lo = sorted((x.average_length, y.average_length), reverse=True)
        return hi, lo

    @property
    def has_ibd(self) -> bool:
        return any(s.count for pairing in self.pairings for s in pairing)


def pairing_summaries(i: DiploidGenome, j: DiploidGenome,
                      min_tract_length: int = DEFAULT_MIN_TRACT) -> PairingSummaries:
    direct = (ibd_tracts(i.hap1, j.hap1, min_tract_length), ibd_tracts(i.hap2, j.hap2, min_tract_length))
    crossed = (ibd_tracts(i.hap1, j.hap2, min_tract_length), ibd_tracts(i.hap2, j.hap1, min_tract_length))
    result = PairingSummaries((direct, crossed), 0)
    s_direct, s_crossed = result.sums()
    # ties go to the un-crossed pairing
    return PairingSummaries((direct, crossed), 1 if s_crossed > s_direct else 0)


def write_tracts(genomes: dict[int, DiploidGenome], fh: TextIO,
                 min_tract_length: int = DEFAULT_MIN_TRACT) -> None:
    ids = sorted(genomes)
    for pos, a in enumerate(ids):
        for b in ids[pos + 1:]:
            for ha in (1, 2):
                for hb in (1, 2):
                    summary = ibd_tracts(genomes[a][ha - 1], genomes[b][hb - 1], min_tract_length)
                    for t in summary.tracts:
                        fh.write(f"{a}\t{ha}\t{b}\t{hb}\t{t.start}\t{t.end}\n")
