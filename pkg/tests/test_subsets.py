import pytest

from mevmix.errors import DomainError
from mevmix.subsets import MAX_DIM, SubsetMask, all_nonempty_subsets


def test_indices_roundtrip():
    a = SubsetMask.from_indices([0, 2], 3)
    assert a.indices == (0, 2)
    assert len(a) == 2
    assert 2 in a and 1 not in a
    assert a.indicator().tolist() == [1.0, 0.0, 1.0]


def test_submasks_enumerates_all_nonempty_subsets():
    a = SubsetMask.from_indices([0, 1, 3], 4)
    subs = {b.indices for b in a.submasks()}
    assert len(subs) == 2**3 - 1
    assert all(set(s) <= {0, 1, 3} for s in subs)


def test_all_nonempty_subsets_count():
    assert len(all_nonempty_subsets(4)) == 15


@pytest.mark.parametrize("bits,d", [(0, 3), (8, 3), (1, 0), (1, MAX_DIM + 1)])
def test_invalid_masks(bits, d):
    with pytest.raises(DomainError):
        SubsetMask(bits, d)


def test_out_of_range_index():
    with pytest.raises(DomainError):
        SubsetMask.from_indices([3], 3)
