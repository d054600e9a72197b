import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pedrecon.ibd import IbdTract, ibd_tracts, pairing_summaries
from pedrecon.simulator import DiploidGenome, Haplotype, SimParams, simulate

L = 100_000_000
MB = 1_000_000


def test_identical_haplotypes():
    h = Haplotype([(0, 40 * MB, 1), (40 * MB, L, 2)], L)
    s = ibd_tracts(h, h)
    assert s.tracts == (IbdTract(0, L),)
    assert s.average_length == L


def test_disjoint_alleles():
    s = ibd_tracts(Haplotype.founder(0, L), Haplotype.founder(1, L))
    assert s.count == 0 and s.average_length == 0


def test_short_tract_filtered():
    a = Haplotype([(0, 3 * MB, 5), (3 * MB, 50 * MB, 1), (50 * MB, 50 * MB + MB // 2, 6),
                   (50 * MB + MB // 2, L, 2)], L)
    b = Haplotype([(0, 3 * MB, 5), (3 * MB, 50 * MB, 3), (50 * MB, 50 * MB + MB // 2, 6),
                   (50 * MB + MB // 2, L, 4)], L)
    s = ibd_tracts(a, b)
    assert s.tracts == (IbdTract(0, 3 * MB),)
    assert s.average_length == 3e6


def test_argument_checks():
    with pytest.raises(ValueError, match="lengths differ"):
        ibd_tracts(Haplotype.founder(0, 10), Haplotype.founder(0, 20))
    with pytest.raises(ValueError):
        ibd_tracts(Haplotype.founder(0, 10), Haplotype.founder(0, 10), 0)


def test_self_pairing():
    g = DiploidGenome(Haplotype.founder(0, L), Haplotype.founder(1, L))
    ps = pairing_summaries(g, g)
    assert ps.chosen == 0
    assert ps.estimates() == (L, L)


def test_unrelated_tie_goes_to_direct_pairing():
    a = DiploidGenome(Haplotype.founder(0, L), Haplotype.founder(1, L))
    b = DiploidGenome(Haplotype.founder(2, L), Haplotype.founder(3, L))
    ps = pairing_summaries(a, b)
    assert ps.chosen == 0 and not ps.has_ibd
    assert ps.sums() == (0.0, 0.0)


def test_crossed_pairing_chosen_when_larger():
    a = DiploidGenome(Haplotype.founder(0, L), Haplotype.founder(1, L))
    b = DiploidGenome(Haplotype.founder(1, L), Haplotype.founder(9, L))
    assert pairing_summaries(a, b).chosen == 1


def test_siblings_chosen_pairing_dominates():
    sim, extant = simulate(SimParams(3, 20, 0.0, 2, seed=1))
    for a, b in sim.sibling_pairs:
        ps = pairing_summaries(extant[a], extant[b])
        s = ps.sums()
        assert s[ps.chosen] >= s[1 - ps.chosen]


cuts = st.lists(st.integers(1, 999), unique=True, max_size=6).map(sorted)


def _hap(points, alleles):
    bounds = [0, *points, 1000]
    return Haplotype([(bounds[k], bounds[k + 1], alleles[k % len(alleles)]) for k in range(len(bounds) - 1)],
                     1000)


@given(pa=cuts, pb=cuts, aa=st.lists(st.integers(0, 2), min_size=1, max_size=4),
       ab=st.lists(st.integers(0, 2), min_size=1, max_size=4), m=st.integers(1, 200))
def test_tracts_match_pointwise_identity(pa, pb, aa, ab, m):
    a, b = _hap(pa, aa), _hap(pb, ab)
    same = np.array([a.allele_at(x) == b.allele_at(x) for x in range(1000)])
    runs, start = [], None
    for x in range(1001):
        on = x < 1000 and same[x]
        if on and start is None:
            start = x
        elif not on and start is not None:
            runs.append((start, x))
            start = None
    expected = tuple(IbdTract(s, e) for s, e in runs if e - s >= m)
    assert ibd_tracts(a, b, m).tracts == expected
    assert ibd_tracts(b, a, m).tracts == expected
