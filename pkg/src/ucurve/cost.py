"""Cost functions over feature subsets.

A cost function is any object with an ``n`` attribute (lattice degree) that
is callable on a subset bit mask and returns a float.  Searches never call it
directly; they go through an :class:`EvaluationLedger`, which memoizes values
and counts distinct evaluations ("computed nodes").
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Protocol, Sequence

import numpy as np

from .lattice import ConfigurationError, LatticeConfig, subset_features

if TYPE_CHECKING:
    from .data import Dataset


class CostFunction(Protocol):
    n: int

    def __call__(self, subset: int) -> float: ...


class InvalidModelError(ValueError):
    pass


class StopSearch(Exception):
    """Raised by a ledger when its budget or target threshold is hit."""

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class EvaluationLedger:
    """Memoizing, counting front end to a cost function.

    ``max_evaluations`` and ``stop_below`` turn the ledger into the stopping
    device of budgeted runs: the evaluation that reaches the budget, or that
    returns a value under the threshold, is recorded and then
    :class:`StopSearch` is raised.  ``stop_inclusive`` makes the threshold
    test ``<=``.
    """

    def __init__(
        self,
        cost: CostFunction,
        max_evaluations: int | None = None,
        stop_below: float | None = None,
        stop_inclusive: bool = False,
    ) -> None:
        self.cost = cost
        self.config = LatticeConfig(cost.n)
        self.cache: dict[int, float] = {}
        self.max_evaluations = max_evaluations
        self.stop_below = stop_below
        self.stop_inclusive = stop_inclusive
        self.on_new: Callable[[int, float], None] | None = None

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def distinct_count(self) -> int:
        return len(self.cache)

    def __contains__(self, subset: int) -> bool:
        return subset in self.cache

    def __call__(self, subset: int) -> float:
        try:
            return self.cache[subset]
        except KeyError:
            pass
        self.config.check(subset)
        value = float(self.cost(subset))
        self.cache[subset] = value
        if self.on_new is not None:
            self.on_new(subset, value)
        if self.stop_below is not None:
            hit = value <= self.stop_below if self.stop_inclusive else value < self.stop_below
            if hit:
                raise StopSearch("target")
        if self.max_evaluations is not None and len(self.cache) >= self.max_evaluations:
            raise StopSearch("budget")
        return value


def evaluate_counted(cost: CostFunction, subset: int, ledger: EvaluationLedger) -> float:
    if ledger.cost is not cost:
        raise ConfigurationError("ledger belongs to a different cost function")
    return ledger(subset)


# -- penalized mean conditional entropy ------------------------------------


@dataclass
class MceModel:
    """Class tallies per observed instance pattern of a projected dataset.

    ``tallies[p, y]`` counts samples with pattern ``p`` and class ``y``.
    """

    t: int
    class_count: int
    tallies: np.ndarray
    patterns: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.tallies = np.asarray(self.tallies, dtype=np.int64)
        if self.tallies.ndim != 2 or self.tallies.shape[1] != self.class_count:
            raise InvalidModelError("tallies must have one column per class")


def penalized_mce(model: MceModel) -> float:
    """Mean conditional entropy of the class given the pattern, with penalty.

    Patterns seen exactly once count as maximal entropy: their total mass
    ``N / t`` is added directly.  The remaining patterns contribute
    ``P(x) * H(Y | x)`` with logarithms in base ``class_count`` so the result
    lies in ``[0, 1]``.
    """
    if model.t < 1:
        raise InvalidModelError("model has no samples")
    if model.class_count < 2:
        raise InvalidModelError("need at least two classes")
    tallies = model.tallies
    if int(tallies.sum()) != model.t:
        raise InvalidModelError("tallies do not sum to t")
    return _pmce(tallies, model.t, math.log(model.class_count))


def _pmce(tallies: np.ndarray, t: int, log_k: float) -> float:
    totals = tallies.sum(axis=1)
    value = np.count_nonzero(totals == 1) / t
    multi = tallies[totals > 1]
    if len(multi):
        m_tot = multi.sum(axis=1)
        p = multi / m_tot[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0, p * np.log(p), 0.0)
        value += float(-(plogp.sum(axis=1) * m_tot).sum() / (t * log_k))
    return min(max(float(value), 0.0), 1.0)


class _PackedSamples:
    """Samples with every feature value packed into a few 64-bit words.

    Feature ``j`` occupies ``bits`` consecutive bits, so the pattern of a
    sample on a subset is its packed row ANDed with the subset's bit mask.
    """

    def __init__(self, values: np.ndarray, n: int) -> None:
        values = np.asarray(values, dtype=np.int64)
        top = int(values.max(initial=0))
        self.n = n
        self.bits = max(1, top.bit_length())
        per_word = 64 // self.bits
        self.width = max(1, -(-n // per_word))
        self.per_word = per_word
        t = values.shape[0]
        packed = np.zeros((t, self.width), dtype=np.uint64)
        for j in range(n):
            w, slot = divmod(j, per_word)
            packed[:, w] |= values[:, j].astype(np.uint64) << np.uint64(slot * self.bits)
        self.packed = packed
        self.field = (1 << self.bits) - 1

    def mask(self, subset: int) -> np.ndarray:
        words = [0] * self.width
        for j in subset_features(subset):
            w, slot = divmod(j, self.per_word)
            words[w] |= self.field << (slot * self.bits)
        return np.array(words, dtype=np.uint64)

    def group(self, subset: int) -> tuple[np.ndarray, np.ndarray]:
        """First-occurrence row of each pattern, and each sample's pattern index."""
        keys = self.packed & self.mask(subset)
        if self.width == 1:
            _, first, inverse = np.unique(keys[:, 0], return_index=True, return_inverse=True)
        else:
            view = np.ascontiguousarray(keys).view(np.dtype((np.void, 8 * self.width)))[:, 0]
            _, first, inverse = np.unique(view, return_index=True, return_inverse=True)
        return first, inverse.reshape(-1)


def _model(packed: _PackedSamples, dataset: Dataset, subset: int) -> MceModel:
    first, inverse = packed.group(subset)
    k = dataset.class_count
    tallies = np.bincount(inverse * k + dataset.labels, minlength=len(first) * k).reshape(len(first), k)
    cols = subset_features(subset)
    patterns = np.asarray(dataset.values)[first][:, cols]
    return MceModel(t=dataset.sample_count, class_count=k, tallies=tallies, patterns=patterns)


def _check_discrete(dataset: Dataset) -> None:
    v = np.asarray(dataset.values)
    if v.size and (v.min() < 0 or not np.all(np.mod(v, 1) == 0)):
        raise InvalidModelError("pattern tallies need non-negative integer feature values")


def project_dataset(dataset: Dataset, subset: int) -> MceModel:
    """Group the samples of ``dataset`` by their values on ``subset``.

    The empty subset yields a single pattern holding every sample.
    """
    LatticeConfig(dataset.feature_count).check(subset)
    _check_discrete(dataset)
    return _model(_PackedSamples(dataset.values, dataset.feature_count), dataset, subset)


class PenalizedMceCost:
    """Penalized mean conditional entropy of a dataset as a subset cost."""

    def __init__(self, dataset: Dataset) -> None:
        _check_discrete(dataset)
        if dataset.class_count < 2:
            raise InvalidModelError("need at least two classes")
        self.dataset = dataset
        self.n = dataset.feature_count
        self._packed = _PackedSamples(dataset.values, self.n)
        self._labels = np.asarray(dataset.labels, dtype=np.int64)
        self._k = dataset.class_count
        self._log_k = math.log(self._k)
        class_bits = max(1, (self._k - 1).bit_length())
        fits = self._packed.width == 1 and self.n * self._packed.bits + class_bits <= 64
        self._class_bits = class_bits if fits else None
        self._labels_u64 = self._labels.astype(np.uint64)

    def model(self, subset: int) -> MceModel:
        return _model(self._packed, self.dataset, subset)

    def __call__(self, subset: int) -> float:
        LatticeConfig(self.n).check(subset)
        if self._class_bits is None:
            return _pmce(self.model(subset).tallies, len(self._labels), self._log_k)
        # sort (pattern, class) pairs packed in one word, then run-length count
        keys = (self._packed.packed[:, 0] & self._packed.mask(subset)[0]) << np.uint64(self._class_bits)
        v = np.sort(keys | self._labels_u64)
        t = len(v)
        starts = np.flatnonzero(np.concatenate(([True], v[1:] != v[:-1])))
        cnt = np.diff(np.append(starts, t))
        pat = v[starts] >> np.uint64(self._class_bits)
        pstarts = np.flatnonzero(np.concatenate(([True], pat[1:] != pat[:-1])))
        tot = np.add.reduceat(cnt, pstarts)
        per_pair = np.repeat(tot, np.diff(np.append(pstarts, len(cnt))))
        info = float((cnt * np.log(cnt / per_pair)).sum())
        value = (np.count_nonzero(tot == 1) - info / self._log_k) / t
        return min(max(float(value), 0.0), 1.0)


# -- synthetic U-shaped instances ------------------------------------------


@dataclass
class SyntheticUInstance:
    """``c(X) = u[|X|] + sum(delta[i] for i in X)``.

    With ``u`` strictly decreasing then strictly increasing, minimum adjacent
    gap ``g`` and every ``delta[i] < g / (2n)``, each chain step keeps the sign
    of the corresponding ``u`` step, so the cost is U-shaped on every chain.
    """

    n: int
    u: Sequence[float]
    delta: Sequence[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        LatticeConfig(self.n)
        self.u = [float(v) for v in self.u]
        self.delta = [float(v) for v in self.delta] if len(self.delta) else [0.0] * self.n
        if len(self.u) != self.n + 1 or len(self.delta) != self.n:
            raise ConfigurationError("u needs n+1 entries and delta n entries")

    def __call__(self, subset: int) -> float:
        value = self.u[subset.bit_count()]
        for i in subset_features(subset):
            value += self.delta[i]
        return value


def synth_u_instance(n: int, seed: int, plateaus: bool = False) -> SyntheticUInstance:
    """Random U-decomposable cost on ``n`` features, deterministic in ``seed``.

    ``plateaus=True`` draws a cardinality-only profile whose steps may be
    flat (weakly U-shaped, ``delta`` all zero).
    """
    if not 2 <= n <= 20:
        raise ConfigurationError(f"synthetic instances support 2 <= n <= 20, got {n}")
    rng = random.Random(seed)
    k_star = rng.randint(0, n)
    if plateaus:
        steps = [float(rng.choice((0, 0, 1, 2))) for _ in range(n)]
    else:
        steps = [1.0 + rng.random() for _ in range(n)]
    u = [0.0] * (n + 1)
    for k in range(k_star - 1, -1, -1):
        u[k] = u[k + 1] + steps[k]
    for k in range(k_star + 1, n + 1):
        u[k] = u[k - 1] + steps[k - 1]
    if plateaus:
        return SyntheticUInstance(n, u, [0.0] * n)
    gap = min(steps)
    delta = [rng.random() * gap / (2 * n) for _ in range(n)]
    return SyntheticUInstance(n, u, delta)


class TrapCost:
    """Six-feature U-shaped cost that greedy forward selection gets wrong.

    Features 0..3 carry individual gains, features 4 and 5 are individually
    harmful but share a joint bonus; the optimum is ``{4, 5}`` (``"000011"``)
    while forward selection settles on ``{0, 1}``.
    """

    n = 6
    weights = (-0.5, -0.4, -0.3, -0.2, 0.3, 0.3)
    bonus = 1.6

    def __call__(self, subset: int) -> float:
        k = subset.bit_count()
        value = (k - 2) ** 2 + sum(self.weights[i] for i in subset_features(subset))
        if subset & 0b110000 == 0b110000:
            value -= self.bonus
        return float(value)


# -- chain utilities -------------------------------------------------------


def random_maximal_chain(n: int, rng: random.Random) -> list[int]:
    """The ``n + 1`` subsets of a uniformly random maximal chain, bottom first."""
    order = list(range(n))
    rng.shuffle(order)
    chain = [0]
    for i in order:
        chain.append(chain[-1] | 1 << i)
    return chain


def is_u_shaped(values: Sequence[float]) -> bool:
    """No strict decrease after a strict increase."""
    rising = False
    for prev, cur in zip(values, values[1:]):
        if cur > prev:
            rising = True
        elif cur < prev and rising:
            return False
    return True


def oscillation_fraction(
    cost: Callable[[int], float], n: int, chains: int, rng: random.Random
) -> float:
    """Fraction of sampled maximal chains whose cost curve is not U-shaped."""
    bad = 0
    for _ in range(chains):
        if not is_u_shaped([cost(s) for s in random_maximal_chain(n, rng)]):
            bad += 1
    return bad / chains if chains else 0.0
