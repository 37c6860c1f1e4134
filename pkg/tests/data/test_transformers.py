import numpy as np
import pytest

from lccde_toolkit.data.transformers import chunked, encode_first_appearance, remap_codes


def test_chunked():
    assert list(chunked("ABCDEFG", 3)) == [["A", "B", "C"], ["D", "E", "F"], ["G"]]
    assert list(chunked([], 2)) == []


def test_chunked_keeps_the_short_tail():
    assert [len(batch) for batch in chunked(range(5), 2)] == [2, 2, 1]
    with pytest.raises(TypeError):
        chunked(range(5), 2, strict=True)


def test_chunked_rejects_zero():
    with pytest.raises(ValueError):
        list(chunked(range(5), 0))


def test_encode_first_appearance():
    codes, names = encode_first_appearance(["T", "R", "T", "R", "X"])
    assert codes.tolist() == [0, 1, 0, 1, 2]
    assert names == ["T", "R", "X"]
    assert codes.dtype == np.int64


def test_encode_first_appearance_empty():
    codes, names = encode_first_appearance([])
    assert codes.tolist() == []
    assert names == []


def test_remap_codes():
    codes = np.array([0, 1, 1, 0])
    assert remap_codes(codes, ["B", "A"], ["A", "B", "C"]).tolist() == [1, 0, 0, 1]
    assert remap_codes(np.array([], dtype=int), ["B"], ["B"]).tolist() == []
