"""Boolean lattice elements, restriction sets and the residual search space.

Subsets of ``W = {0, ..., n-1}`` are plain Python ints used as bit masks:
bit ``i`` is set iff feature ``i`` belongs to the subset.  The textual form is
a string of ``0``/``1`` whose leftmost character is feature 0, so ``"1000"``
is ``0b0001`` and ``"0011"`` is ``0b1100``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal

import numpy as np

MAX_DEGREE = 1024

Kind = Literal["lower", "upper"]
Side = Literal["lower", "upper"]


class ConfigurationError(ValueError):
    """A subset or restriction set does not fit the lattice it is used with."""


@dataclass(frozen=True)
class LatticeConfig:
    """Degree of the Boolean lattice (number of features)."""

    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_DEGREE:
            raise ConfigurationError(f"lattice degree must be in [1, {MAX_DEGREE}], got {self.n}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def check(self, subset: int) -> int:
        if subset < 0 or subset >> self.n:
            raise ConfigurationError(f"subset {subset:#x} does not fit a lattice of degree {self.n}")
        return subset


def popcount(subset: int) -> int:
    return subset.bit_count()


def parse_subset(text: str) -> int:
    """Parse a ``0``/``1`` string; the leftmost character is feature 0."""
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ConfigurationError(f"not a subset string: {text!r}")
    bits = 0
    for i, ch in enumerate(text):
        if ch == "1":
            bits |= 1 << i
    return bits


def format_subset(subset: int, n: int) -> str:
    return "".join("1" if subset >> i & 1 else "0" for i in range(n))


def subset_features(subset: int) -> list[int]:
    """Indices of the features in ``subset``, ascending."""
    out = []
    i = 0
    while subset:
        if subset & 1:
            out.append(i)
        subset >>= 1
        i += 1
    return out


_WORD = 64
_WORD_MASK = (1 << _WORD) - 1


def _words(subset: int, width: int) -> np.ndarray:
    return np.array([(subset >> (_WORD * i)) & _WORD_MASK for i in range(width)], dtype=np.uint64)


_NUMPY_MIN_ROWS = 48


class RestrictionSet:
    """An antichain of lower (``[0, R]``) or upper (``[R, W]``) restrictions.

    Besides the antichain the set keeps an append-only log of every
    restriction ever inserted.  The covered region is the same whether
    computed from the log or from the antichain (removed elements always lie
    inside the one that replaced them), so :meth:`covers` can remember, per
    queried subset, how far into the log it has already looked.

    Long scans run over a mirror of the elements as rows of 64-bit words.
    """

    def __init__(self, kind: Kind, n: int, elements: Iterable[int] = ()) -> None:
        if kind not in ("lower", "upper"):
            raise ConfigurationError(f"unknown restriction kind {kind!r}")
        self.kind: Kind = kind
        self.config = LatticeConfig(n)
        self._width = (n + _WORD - 1) // _WORD
        self._anti: list[int] = []
        self._anti_rows = np.zeros((0, self._width), dtype=np.uint64)
        self._log: list[int] = []
        self._log_rows = np.zeros((64, self._width), dtype=np.uint64)
        self._checked: dict[int, int] = {}
        self._covered: set[int] = set()
        for r in elements:
            self.update(r)

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def elements(self) -> list[int]:
        return list(self._anti)

    def __iter__(self) -> Iterator[int]:
        return iter(list(self._anti))

    def __len__(self) -> int:
        return len(self._anti)

    def __contains__(self, subset: object) -> bool:
        return subset in self._anti

    def __repr__(self) -> str:
        items = ", ".join(format_subset(r, self.n) for r in self._anti)
        return f"RestrictionSet({self.kind}, {{{items}}})"

    def _scan(self, subset: int, ints: list[int], rows: np.ndarray, start: int = 0) -> bool:
        """Whether any of ``ints[start:]`` (mirrored by ``rows``) covers ``subset``."""
        lower = self.kind == "lower"
        if len(ints) - start < _NUMPY_MIN_ROWS:
            if lower:
                return any(subset & ints[i] == subset for i in range(start, len(ints)))
            return any(subset & ints[i] == ints[i] for i in range(start, len(ints)))
        rows = rows[start : len(ints)]
        if self._width == 1:
            a = np.uint64(subset)
            col = rows[:, 0]
            inside = (a & ~col) == 0 if lower else (col & ~a) == 0
            return bool(inside.any())
        a = _words(subset, self._width)
        inside = (a & ~rows) == 0 if lower else (rows & ~a) == 0
        return bool(inside.all(axis=1).any())

    def covers(self, subset: int) -> bool:
        """True iff ``subset`` lies inside one of the restricted intervals."""
        self.config.check(subset)
        if subset in self._covered:
            return True
        start = self._checked.get(subset, 0)
        end = len(self._log)
        if start < end and self._scan(subset, self._log, self._log_rows, start):
            self._covered.add(subset)
            self._checked.pop(subset, None)
            return True
        self._checked[subset] = end
        return False

    def covers_any(self, subset: int) -> bool:
        """Uncached antichain scan, for throwaway candidates."""
        if subset in self._covered:
            return True
        return self._scan(subset, self._anti, self._anti_rows)

    def update(self, subset: int) -> bool:
        """Insert ``subset`` keeping the antichain; return False on a no-op."""
        if self.covers(subset):
            return False
        row = _words(subset, self._width)
        if len(self._anti) < _NUMPY_MIN_ROWS:
            if self.kind == "lower":
                drop = [i for i, r in enumerate(self._anti) if r & subset == r]
            else:
                drop = [i for i, r in enumerate(self._anti) if r & subset == subset]
        else:
            rows = self._anti_rows
            inside = (rows & ~row) == 0 if self.kind == "lower" else (row & ~rows) == 0
            drop = np.flatnonzero(inside.all(axis=1)).tolist()
        if drop:
            for i in reversed(drop):
                del self._anti[i]
            self._anti_rows = np.delete(self._anti_rows, drop, axis=0)
        self._anti.append(subset)
        self._anti_rows = np.concatenate([self._anti_rows, row[None, :]])
        if len(self._log) == len(self._log_rows):
            self._log_rows = np.vstack([self._log_rows, np.zeros_like(self._log_rows)])
        self._log_rows[len(self._log)] = row
        self._log.append(subset)
        self._covered.add(subset)
        self._checked.pop(subset, None)
        return True

    def copy(self) -> RestrictionSet:
        return RestrictionSet(self.kind, self.n, self._anti)

    def dumps(self) -> str:
        """One subset string per line."""
        return "".join(format_subset(r, self.n) + "\n" for r in self._anti)

    @classmethod
    def loads(cls, kind: Kind, n: int, text: str) -> RestrictionSet:
        return cls(kind, n, (parse_subset(line) for line in text.splitlines() if line.strip()))


def _expect(rs: RestrictionSet, kind: Kind) -> None:
    if rs.kind != kind:
        raise ConfigurationError(f"expected a {kind} restriction set, got {rs.kind}")


def in_lower_space(subset: int, lower: RestrictionSet) -> bool:
    """Membership in the lattice minus every ``[0, R]``.

    Equivalent to ``subset & ~R != 0`` for every ``R`` in the set.
    """
    _expect(lower, "lower")
    return not lower.covers(subset)


def in_upper_space(subset: int, upper: RestrictionSet) -> bool:
    _expect(upper, "upper")
    return not upper.covers(subset)


def minimal_element(lower: RestrictionSet, rng: random.Random) -> int:
    """A minimal element of the space left by ``lower``.

    Starts from the full set and tries to drop each feature once, in a
    shuffled order, keeping the drop whenever the result still escapes every
    lower restriction.  Returns the full set when it is itself covered.
    """
    _expect(lower, "lower")
    n = lower.n
    order = list(range(n))
    rng.shuffle(order)
    c = (1 << n) - 1
    for k in order:
        cand = c & ~(1 << k)
        if not lower.covers_any(cand):
            c = cand
    return c


def maximal_element(upper: RestrictionSet, rng: random.Random) -> int:
    _expect(upper, "upper")
    n = upper.n
    order = list(range(n))
    rng.shuffle(order)
    c = 0
    for k in order:
        cand = c | 1 << k
        if not upper.covers_any(cand):
            c = cand
    return c


def update_lower_restriction(subset: int, lower: RestrictionSet) -> RestrictionSet:
    _expect(lower, "lower")
    lower.update(subset)
    return lower


def update_upper_restriction(subset: int, upper: RestrictionSet) -> RestrictionSet:
    _expect(upper, "upper")
    upper.update(subset)
    return upper


def space_is_exhausted(lower: RestrictionSet, upper: RestrictionSet) -> bool:
    """The emptiness certificate: ``W`` covered below or the empty set above."""
    _expect(lower, "lower")
    _expect(upper, "upper")
    return lower.covers(lower.config.full) or upper.covers(0)


@dataclass
class SearchSpaceView:
    """The residual poset left by a pair of restriction sets."""

    lower: RestrictionSet
    upper: RestrictionSet

    def __post_init__(self) -> None:
        _expect(self.lower, "lower")
        _expect(self.upper, "upper")
        if self.lower.n != self.upper.n:
            raise ConfigurationError("restriction sets disagree on the lattice degree")

    @classmethod
    def empty(cls, n: int) -> SearchSpaceView:
        return cls(RestrictionSet("lower", n), RestrictionSet("upper", n))

    @property
    def n(self) -> int:
        return self.lower.n

    def __contains__(self, subset: int) -> bool:
        return not self.lower.covers(subset) and not self.upper.covers(subset)

    def is_exhausted(self) -> bool:
        return space_is_exhausted(self.lower, self.upper)

    def adjacents(self, subset: int, side: Side) -> list[int]:
        return adjacents_in_space(subset, self, side)


def adjacents_in_space(subset: int, view: SearchSpaceView, side: Side) -> list[int]:
    """One-bit neighbours of ``subset`` on ``side`` that are still in ``view``.

    Ordered by ascending feature index.
    """
    if side not in ("lower", "upper"):
        raise ConfigurationError(f"unknown side {side!r}")
    view.lower.config.check(subset)
    out = []
    for i in range(view.n):
        bit = 1 << i
        if side == "upper":
            if subset & bit:
                continue
            cand = subset | bit
        else:
            if not subset & bit:
                continue
            cand = subset & ~bit
        if cand in view:
            out.append(cand)
    return out
