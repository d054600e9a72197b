import pytest

from pedrecon.pedigree import Individual, Pedigree, Sex

M, F = Sex.MALE, Sex.FEMALE


def small_family() -> Pedigree:
    """Four generations; 13 and 14 are full siblings, 15 is their half-sibling through 10."""
    rows = [
        Individual(1, M, 4), Individual(2, F, 4),
        Individual(3, M, 3), Individual(4, F, 3, 1, 2), Individual(5, F, 3),
        Individual(6, M, 3, 1, 2), Individual(7, F, 3), Individual(8, M, 3),
        Individual(9, M, 2, 3, 4), Individual(10, F, 2, 6, 7), Individual(11, M, 2, 8, 5),
        Individual(13, M, 1, 9, 10), Individual(14, F, 1, 9, 10), Individual(15, M, 1, 11, 10),
    ]
    return Pedigree(rows)


@pytest.fixture
def family() -> Pedigree:
    return small_family()
