"""Reference searches: sequential floating forward selection and full search."""

from __future__ import annotations

from dataclasses import dataclass

from .cost import CostFunction, EvaluationLedger
from .lattice import ConfigurationError, format_subset
from .search import ResultList

EXHAUSTIVE_LIMIT = 24


@dataclass
class SffsConfig:
    delta: int = 3
    target_dim: int | None = None
    result_capacity: int = 1

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ConfigurationError("delta must be non-negative")
        if self.target_dim is not None and self.target_dim < 1:
            raise ConfigurationError("target_dim must be positive")


@dataclass
class BaselineOutcome:
    results: ResultList
    ledger: EvaluationLedger
    complete: bool = True
    stop_reason: str = "done"

    @property
    def best_subset(self) -> int:
        return self.results.entries[0][0]

    @property
    def best_cost(self) -> float:
        return self.results.best_cost

    @property
    def computed_nodes(self) -> int:
        return self.ledger.distinct_count


def sffs(cost: CostFunction, config: SffsConfig | None = None, ledger: EvaluationLedger | None = None) -> BaselineOutcome:
    """Sequential forward floating selection, minimizing ``cost``.

    From the empty set, alternate a forward step (add the feature giving the
    lowest cost) with conditional backward steps (drop a feature while that
    beats the best subset recorded at the smaller size).  The best subset of
    every size is kept.  The run stops once the working size reaches
    ``target_dim + delta``, or, when sweeping, ``min(n, best size + delta)``
    with the best size re-read after every step.  Ties go to the lowest
    feature index.
    """
    config = config or SffsConfig()
    ledger = ledger or EvaluationLedger(cost)
    n = cost.n
    c = ledger
    best: dict[int, tuple[int, float]] = {0: (0, c(0))}
    current = 0
    size = 0

    def record(subset: int, value: float) -> None:
        k = subset.bit_count()
        if k not in best or value < best[k][1]:
            best[k] = (subset, value)

    def stop_size() -> int:
        if config.target_dim is not None:
            return min(n, config.target_dim + config.delta)
        best_k = min(best, key=lambda k: (best[k][1], k))
        return min(n, max(1, best_k + config.delta))

    while size < stop_size():
        add = min(
            (i for i in range(n) if not current >> i & 1),
            key=lambda i: (c(current | 1 << i), i),
        )
        current |= 1 << add
        size += 1
        record(current, c(current))
        while size > 1:
            drop = min(
                (i for i in range(n) if current >> i & 1),
                key=lambda i: (c(current & ~(1 << i)), i),
            )
            reduced = current & ~(1 << drop)
            if c(reduced) < best[size - 1][1]:
                current = reduced
                size -= 1
                record(current, c(current))
            else:
                break

    results = ResultList(config.result_capacity, n)
    for subset, value in best.values():
        results.update(subset, value)
    return BaselineOutcome(results, ledger)


def exhaustive(cost: CostFunction, result_capacity: int = 1, force: bool = False) -> BaselineOutcome:
    """Evaluate every subset.  Refuses ``n > 24`` unless ``force`` is set."""
    n = cost.n
    if n > EXHAUSTIVE_LIMIT and not force:
        raise ConfigurationError(
            f"full search over 2^{n} subsets refused; pass force=True to override"
        )
    ledger = EvaluationLedger(cost)
    results = ResultList(result_capacity, n)
    for subset in range(1 << n):
        value = ledger(subset)
        if len(results) < result_capacity or value <= results.entries[-1][1]:
            results.update(subset, value)
    return BaselineOutcome(results, ledger)


def describe(outcome: BaselineOutcome, n: int) -> str:
    subset, value = outcome.results.entries[0]
    return f"{format_subset(subset, n)} cost={value!r} nodes={outcome.computed_nodes}"
