import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from pedrecon.pedigree import (
    INFINITY,
    Individual,
    Pedigree,
    PedigreeError,
    Sex,
    distances_from,
    enumerate_inheritance_paths,
    extant_descendants,
    read_pedigree,
    shortest_distance,
    write_pedigree,
)
from pedrecon.simulator import SimParams, simulate_pedigree

import numpy as np


def test_sibling_distance_is_two(family):
    assert shortest_distance(family, 13, 14) == 2


def test_self_distance_zero(family):
    assert shortest_distance(family, 13, 13) == 0


def test_ancestor_distance(family):
    assert shortest_distance(family, 1, 13) == 3


def test_disconnected_is_infinite():
    ped = Pedigree([Individual(1, Sex.MALE, 1), Individual(2, Sex.FEMALE, 1)])
    assert shortest_distance(ped, 1, 2) == INFINITY
    assert math.isinf(shortest_distance(ped, 1, 2))


def test_descendants(family):
    assert extant_descendants(family, 10) == {13, 14, 15}
    assert extant_descendants(family, 1) == {13, 14, 15}
    assert extant_descendants(family, 13) == {13}
    assert extant_descendants(family, 11) == {15}


def test_inheritance_paths(family):
    paths = enumerate_inheritance_paths(family, 1, 13)
    assert sorted(paths) == [[13, 9, 4, 1], [13, 10, 6, 1]]
    assert enumerate_inheritance_paths(family, 1, 15) == [[15, 10, 6, 1]]
    assert enumerate_inheritance_paths(family, 8, 13) == []


def test_unknown_id(family):
    with pytest.raises(KeyError, match="unknown individual"):
        family[99]


@pytest.mark.parametrize("ind, msg", [
    (Individual(20, Sex.MALE, 1, 9, None), "exactly one"),
    (Individual(20, Sex.MALE, 1, 9, 9), "identical parents"),
    (Individual(20, Sex.MALE, 1, 9, 99), "not in pedigree"),
    (Individual(20, Sex.MALE, 2, 9, 10), "one generation older"),
    (Individual(20, Sex.MALE, 1, 10, 9), "has sex"),
    (Individual(0, Sex.MALE, 1), "positive"),
    (Individual(13, Sex.MALE, 1), "duplicate"),
])
def test_add_rejects(family, ind, msg):
    with pytest.raises(PedigreeError, match=msg):
        family.add(ind)


def test_set_parents(family):
    family.add(Individual(20, Sex.MALE, 2))
    family.add(Individual(21, Sex.FEMALE, 2))
    family.add(Individual(22, Sex.UNKNOWN, 1))
    family.set_parents(22, 20, 21)
    assert family.parents(22) == (20, 21)
    assert family.children(20) == [22]
    with pytest.raises(PedigreeError, match="already has parents"):
        family.set_parents(22, 20, 21)


def test_mates(family):
    assert family.mates(10) == {9, 11}
    assert family.mates(9) == {10}


def test_validate_flags_childless_ancestor(family):
    family.add(Individual(30, Sex.MALE, 2))
    with pytest.raises(PedigreeError, match="no children"):
        family.validate()


def test_round_trip(family):
    buf = io.StringIO()
    write_pedigree(family, buf)
    buf.seek(0)
    back = read_pedigree(buf)
    assert list(back) == list(family)


def test_read_rejects_bad_rows():
    with pytest.raises(PedigreeError, match="line 1"):
        read_pedigree(io.StringIO("1\tM\t1\n"))
    with pytest.raises(PedigreeError, match="line 1"):
        read_pedigree(io.StringIO("1\tX\t1\t0\t0\n"))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), height=st.integers(2, 4))
def test_distance_properties(seed, height):
    params = SimParams(avg_children=2, pop_size=8, half_sibling_rate=0.5, height=height, seed=seed)
    ped = simulate_pedigree(params, np.random.default_rng(seed)).pedigree
    ped.validate()
    ext = ped.extant
    for i in ext:
        d = distances_from(ped, i)
        for j in ext:
            assert d.get(j, INFINITY) == shortest_distance(ped, j, i)
        for k in ped.ids():
            if ped[k].generation > 1 and i in extant_descendants(ped, k):
                assert d[k] == ped[k].generation - 1
