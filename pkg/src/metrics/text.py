"""
Transcript normalization, Levenshtein distance and character error rate.
"""

import re
from typing import Union

import numpy as np
from numba import njit

_WHITESPACE = re.compile(r"\s+")


class Transcript(str):
    """
    Normalized transcript: lowercased, whitespace runs collapsed to one space,
    leading/trailing whitespace stripped. Normalization is idempotent.
    """

    def __new__(cls, text: Union[str, "Transcript", None] = ""):
        if isinstance(text, Transcript):
            return text
        return super().__new__(cls, normalize_text(text or ""))


def normalize_text(text: str) -> str:
    return _WHITESPACE.sub(" ", text.lower()).strip()


def _codes(text: str) -> np.ndarray:
    return np.fromiter((ord(c) for c in text), dtype=np.int64, count=len(text))


@njit(cache=True)
def _levenshtein(a, b):
    n = a.shape[0]
    m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    previous = np.arange(m + 1)
    current = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        current[0] = i
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            current[j] = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
        previous, current = current, previous
    return previous[m]


def edit_distance(a: str, b: str) -> int:
    """
    Unit-cost Levenshtein distance over characters, spaces included.

    Inputs are compared as given; wrap them in ``Transcript`` to normalize first.
    """
    return int(_levenshtein(_codes(a), _codes(b)))


def cer(a: str, b: str) -> float:
    """
    Character error rate: ``edit_distance(a, b) / max(len(a), len(b))``.

    Two empty strings have CER 0.
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return edit_distance(a, b) / longest
