import pytest
from hypothesis import given, settings, strategies as st

from pedrecon.evaluate import accuracy
from pedrecon.ipp import build_tables
from pedrecon.pedigree import Sex
from pedrecon.reconstruct import ReconstructConfig, TruthClassifier, reconstruct
from pedrecon.simulator import DiploidGenome, Haplotype, SimParams, simulate
from pedrecon.stats import SIBLING_ONLY_KINDS, PairingRule

from conftest import small_family

L = 3_000_000_000


def test_config_checks():
    with pytest.raises(ValueError):
        ReconstructConfig(max_height=1)
    assert ReconstructConfig(pairing_rule="eq4").pairing_rule is PairingRule.EQ4
    assert ReconstructConfig(sibling_only=True).kinds == SIBLING_ONLY_KINDS


def test_needs_two_individuals():
    g = DiploidGenome(Haplotype.founder(0, 10), Haplotype.founder(1, 10))
    with pytest.raises(ValueError):
        reconstruct({1: g})


def test_two_full_siblings():
    # each haplotype pair shares one 50 Mb tract, the full-sibling expectation
    n, half = 10 ** 8, 5 * 10 ** 7
    x = DiploidGenome(Haplotype([(0, half, 0), (half, n, 1)], n), Haplotype([(0, half, 2), (half, n, 3)], n))
    y = DiploidGenome(Haplotype([(0, half, 0), (half, n, 4)], n), Haplotype([(0, half, 5), (half, n, 3)], n))
    a, b = 1, 2
    rec = reconstruct({a: x, b: y}, ReconstructConfig(max_height=2))
    ped = rec.pedigree
    assert len(ped) == 4
    assert ped.parents(a) == ped.parents(b)


def test_small_family_through_truth():
    truth = small_family()
    extant = {i: DiploidGenome(Haplotype.founder(2 * i, 10), Haplotype.founder(2 * i + 1, 10))
              for i in truth.extant}
    rec = reconstruct(extant, ReconstructConfig(max_height=2), classifier=TruthClassifier(truth))
    ped = rec.pedigree
    assert set(ped.parents(13)) == set(ped.parents(14))
    assert len(set(ped.parents(13)) & set(ped.parents(15))) == 1


def test_all_unrelated_still_creates_parents():
    extant = {i: DiploidGenome(Haplotype.founder(2 * i, 10 ** 8), Haplotype.founder(2 * i + 1, 10 ** 8))
              for i in (1, 2, 3)}
    rec = reconstruct(extant, ReconstructConfig(max_height=3))
    assert len(rec.pedigree.generation(2)) == 6
    assert len(rec.pedigree.generation(3)) == 12


def test_trace_and_tables():
    sim, extant = simulate(SimParams(2, 12, 0.6, 3, genome_length=L, seed=2))
    rec = reconstruct(extant, ReconstructConfig(max_height=3, pairing_rule="eq4"))
    assert [t["generation"] for t in rec.trace] == [1, 2]
    assert all(t["pairing_rule"] == "eq4" for t in rec.trace)
    assert rec.tables == build_tables(rec.pedigree)
    for t in rec.trace:
        labels = {x for pair in t["labels"].values() for x in pair}
        assert len(rec.pedigree.generation(t["generation"] + 1)) == len(labels)


def test_deterministic():
    sim, extant = simulate(SimParams(2, 12, 0.6, 4, genome_length=L, seed=9))
    a = reconstruct(extant, ReconstructConfig(max_height=4))
    b = reconstruct(extant, ReconstructConfig(max_height=4))
    assert list(a.pedigree) == list(b.pedigree) and a.trace == b.trace


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), rate=st.sampled_from([0.0, 0.5, 0.8]), height=st.integers(2, 4))
def test_output_is_valid_pedigree(seed, rate, height):
    sim, extant = simulate(SimParams(2, 10, rate, height, genome_length=L, seed=seed))
    rec = reconstruct(extant, ReconstructConfig(max_height=height))
    ped = rec.pedigree
    ped.validate()
    assert ped.height == height
    assert ped.extant == sorted(extant)
    for ind in ped:
        if ind.generation < height:
            assert len(ind.parents) == 2


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), rate=st.sampled_from([0.0, 0.5, 0.8]), height=st.integers(2, 5))
def test_truth_classifier_is_lossless(seed, rate, height):
    sim, extant = simulate(SimParams(2, 12, rate, height, genome_length=10 ** 6, seed=seed))
    rec = reconstruct(extant, ReconstructConfig(max_height=height), classifier=TruthClassifier(sim.pedigree))
    assert accuracy(rec.pedigree, sim.pedigree).accuracy == 1.0
