from collections.abc import Iterable, Sequence
from itertools import islice
from typing import TypeVar

import numpy as np
import pandas as pd

_T = TypeVar("_T")


def chunked(iterable: Iterable[_T], n: int) -> Iterable[list[_T]]:
    # batched('ABCDEFG', 2) → AB CD EF G
    if n < 1:
        raise ValueError("n must be at least one")
    iterator = iter(iterable)
    while batch := list(islice(iterator, n)):
        yield batch


def encode_first_appearance(values: Sequence[str]) -> tuple[np.ndarray, list[str]]:
    """Dense integer codes 0..n-1, assigned in order of first appearance."""
    codes, uniques = pd.factorize(pd.Series(list(values), dtype=object), sort=False)
    return codes.astype(np.int64), [str(name) for name in uniques]


def remap_codes(
    codes: np.ndarray, names: Sequence[str], target_names: Sequence[str]
) -> np.ndarray:
    """Translate codes indexing `names` into codes indexing `target_names`.

    Every name must be present in `target_names`.
    """
    position = {name: index for index, name in enumerate(target_names)}
    lookup = np.array([position[name] for name in names], dtype=np.int64)
    if len(codes) == 0:
        return np.zeros(0, dtype=np.int64)
    return lookup[np.asarray(codes, dtype=np.int64)]
