import pytest

from ergoalloc.core import (
    Configuration,
    InvalidAssemblyError,
    check_workers,
    is_union_of,
    make_workers,
    mask_of,
    pieces_of,
    Worker,
)


def test_mask_round_trip():
    assert mask_of([0, 2, 5]) == 0b100101
    assert pieces_of(0b100101) == [0, 2, 5]


def test_configuration_canonical():
    a = Configuration.from_parts([0b1100, 0b0001, 0b0010], 4)
    b = Configuration.from_parts([0b0010, 0b1100, 0b0001], 4)
    assert a == b
    assert hash(a) == hash(b)
    assert a.parts == (0b0001, 0b0010, 0b1100)


@pytest.mark.parametrize(
    "parts",
    [
        [0b0011, 0b0110, 0b1000],  # overlap
        [0b0011, 0b0100],  # missing piece
        [0b0011, 0, 0b1100],  # empty part
    ],
)
def test_configuration_rejects_non_partitions(parts):
    with pytest.raises(InvalidAssemblyError):
        Configuration.from_parts(parts, 4)


def test_initial_and_final():
    assert len(Configuration.initial(5)) == 5
    assert Configuration.final(5).is_final()
    assert not Configuration.initial(5).is_final()


def test_split_join_inverse():
    final = Configuration.final(3)
    split = final.split(0b111, 0b001, 0b110)
    assert split.parts == (0b001, 0b110)
    assert split.join(0b001, 0b110) == final


def test_join_unknown_part():
    with pytest.raises(InvalidAssemblyError):
        Configuration.initial(3).join(0b001, 0b110)


def test_refinement():
    coarse = Configuration.from_parts([0b0011, 0b1100], 4)
    assert coarse.is_refined_by(Configuration.initial(4))
    assert not Configuration.initial(4).is_refined_by(coarse)
    assert is_union_of(0b0110, [0b0010, 0b0100, 0b1001]) is True
    assert is_union_of(0b0110, [0b0011, 0b1100]) is False


def test_workers():
    workers = make_workers(3)
    assert [w.kind for w in workers] == ["human", "robot", "robot"]
    assert workers[0].is_human()

    with pytest.raises(InvalidAssemblyError):
        check_workers([Worker("a", "human"), Worker("b", "human")])
    with pytest.raises(InvalidAssemblyError):
        check_workers([Worker("a", "robot", 1.0), Worker("a", "robot", 1.0)])
    with pytest.raises(InvalidAssemblyError):
        make_workers(0)
