"""U-curve branch-and-bound search over the Boolean lattice.

Each iteration picks a direction, builds a chain from a minimal (or maximal)
element of the live space until the cost strictly rises, cuts the intervals
below and above the chain minimum, and then exhausts the neighbourhood of
that minimum.  The run ends when the restriction sets certify that nothing is
left to visit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Literal, Union

from .cost import CostFunction, EvaluationLedger, StopSearch
from .lattice import (
    ConfigurationError,
    RestrictionSet,
    SearchSpaceView,
    adjacents_in_space,
    format_subset,
    maximal_element,
    minimal_element,
    space_is_exhausted,
)

Direction = Literal["down_up", "up_down"]
DirectionPolicy = Union[float, Literal["adaptive"]]
Trace = Callable[[str], None]


@dataclass
class SearchConfig:
    """Parameters of one U-curve run.

    ``direction_policy`` is either the probability of choosing the down-up
    direction or ``"adaptive"``.  ``max_evaluations`` and ``stop_below`` make
    a budgeted run; without them the run goes until the space is exhausted.
    """

    seed: int = 0
    result_capacity: int = 1
    direction_policy: DirectionPolicy = 0.5
    max_evaluations: int | None = None
    exhaust_trial_limit: int | None = None
    stop_below: float | None = None
    stop_inclusive: bool = False

    def __post_init__(self) -> None:
        if self.result_capacity < 1:
            raise ConfigurationError("result_capacity must be >= 1")
        if self.direction_policy != "adaptive":
            p = float(self.direction_policy)
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"direction probability {p} outside [0, 1]")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ConfigurationError("max_evaluations must be positive")
        if self.exhaust_trial_limit is not None and self.exhaust_trial_limit < 1:
            raise ConfigurationError("exhaust_trial_limit must be positive")


class ResultList:
    """Best ``capacity`` distinct subsets seen, cheapest first.

    Ties are ordered by the subset string, ascending.
    """

    def __init__(self, capacity: int, n: int) -> None:
        self.capacity = capacity
        self.n = n
        self.entries: list[tuple[int, float]] = []

    def _key(self, entry: tuple[int, float]) -> tuple[float, str]:
        return entry[1], format_subset(entry[0], self.n)

    def update(self, subset: int, cost: float) -> bool:
        if any(s == subset for s, _ in self.entries):
            return False
        if len(self.entries) >= self.capacity and self._key((subset, cost)) >= self._key(self.entries[-1]):
            return False
        self.entries.append((subset, cost))
        self.entries.sort(key=self._key)
        del self.entries[self.capacity :]
        return True

    @property
    def best(self) -> tuple[int, float] | None:
        return self.entries[0] if self.entries else None

    @property
    def best_cost(self) -> float:
        if not self.entries:
            raise LookupError("no results")
        return self.entries[0][1]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def update_results(subset: int, cost: float, results: ResultList) -> None:
    results.update(subset, cost)


@dataclass
class ChainRecord:
    """Penultimate element ``below``, chain minimum ``minimum``, stopper ``above``.

    For an up-down chain ``below`` and ``above`` keep the same meaning in chain
    order: ``below`` precedes the minimum, ``above`` follows it.
    """

    below: int | None
    minimum: int
    above: int | None
    direction: Direction = "down_up"


@dataclass
class SearchState:
    view: SearchSpaceView
    results: ResultList
    ledger: EvaluationLedger
    rng: random.Random
    minima_lower: int = 0
    minima_upper: int = 0
    trace: Trace | None = None
    iterations: int = 0

    @classmethod
    def start(cls, cost: CostFunction, config: SearchConfig, trace: Trace | None = None) -> SearchState:
        n = cost.n
        ledger = EvaluationLedger(
            cost,
            max_evaluations=config.max_evaluations,
            stop_below=config.stop_below,
            stop_inclusive=config.stop_inclusive,
        )
        return cls(
            view=SearchSpaceView(RestrictionSet("lower", n), RestrictionSet("upper", n)),
            results=ResultList(config.result_capacity, n),
            ledger=ledger,
            rng=random.Random(config.seed),
            trace=trace,
        )

    @property
    def n(self) -> int:
        return self.view.n

    @property
    def lower(self) -> RestrictionSet:
        return self.view.lower

    @property
    def upper(self) -> RestrictionSet:
        return self.view.upper

    def emit(self, event: str, subset: int | None = None, cost: float | None = None, detail: str = "") -> None:
        if self.trace is None:
            return
        s = "-" if subset is None else format_subset(subset, self.n)
        c = "-" if cost is None else repr(cost)
        self.trace(f"{event}\t{s}\t{c}\t{detail}")

    def restrict(self, side: str, subset: int, origin: str) -> None:
        rs = self.lower if side == "lower" else self.upper
        if rs.update(subset):
            cost = self.ledger.cache.get(subset)
            self.emit(f"restrict_{side}", subset, cost, origin)

    def record(self, subset: int, cost: float) -> None:
        if self.results.update(subset, cost):
            self.emit("result", subset, cost)


@dataclass
class SearchOutcome:
    results: ResultList
    ledger: EvaluationLedger
    complete: bool
    stop_reason: str
    iterations: int
    state: SearchState = field(repr=False)

    @property
    def best_subset(self) -> int:
        return self.results.entries[0][0]

    @property
    def best_cost(self) -> float:
        return self.results.best_cost

    @property
    def computed_nodes(self) -> int:
        return self.ledger.distinct_count


def u_curve_condition(next_cost: float, current_cost: float) -> bool:
    """Chain stop test: the next element is strictly more expensive."""
    return next_cost > current_cost


def select_direction(state: SearchState, config: SearchConfig) -> Direction:
    """Down-up with a fixed probability, or adaptively.

    The adaptive policy favours down-up in proportion to the local minima
    found so far in the lower half of the lattice (``|M| <= n/2``), with
    add-one smoothing: ``(1 + lower) / (2 + total)``.
    """
    p = down_up_probability(state, config)
    return "down_up" if state.rng.random() < p else "up_down"


def down_up_probability(state: SearchState, config: SearchConfig) -> float:
    if config.direction_policy == "adaptive":
        total = state.minima_lower + state.minima_upper
        return (1 + state.minima_lower) / (2 + total)
    return float(config.direction_policy)


def _build_chain(state: SearchState, start: int, side: str) -> tuple[int | None, int, int | None]:
    cost = state.ledger
    m = None
    b: int | None = start
    while True:
        a, m = m, b
        steps = adjacents_in_space(m, state.view, side)
        b = state.rng.choice(steps) if steps else None
        state.emit("chain", m, cost(m), side)
        if b is None or u_curve_condition(cost(b), cost(m)):
            return a, m, b


def down_up_direction(state: SearchState, config: SearchConfig | None = None) -> ChainRecord | None:
    """One down-up iteration; returns None when the start was discarded."""
    start = minimal_element(state.lower, state.rng)
    if state.upper.covers(start):
        state.restrict("lower", start, "discard")
        return None
    a, m, b = _build_chain(state, start, "upper")
    if a is not None:
        state.restrict("lower", a, "chain")
    if b is not None:
        state.restrict("upper", b, "chain")
    state.record(m, state.ledger(m))
    minimum_exhausting(m, state, limit=config.exhaust_trial_limit if config else None)
    return ChainRecord(a, m, b, "down_up")


def up_down_direction(state: SearchState, config: SearchConfig | None = None) -> ChainRecord | None:
    """Dual of :func:`down_up_direction`, descending from a maximal element."""
    start = maximal_element(state.upper, state.rng)
    if state.lower.covers(start):
        state.restrict("upper", start, "discard")
        return None
    a, m, b = _build_chain(state, start, "lower")
    if a is not None:
        state.restrict("upper", a, "chain")
    if b is not None:
        state.restrict("lower", b, "chain")
    state.record(m, state.ledger(m))
    minimum_exhausting(m, state, limit=config.exhaust_trial_limit if config else None)
    return ChainRecord(a, m, b, "up_down")


def minimum_exhausting(m: int, state: SearchState, limit: int | None = None) -> None:
    """Stack walk that turns ``m`` and its cheaper-or-equal neighbourhood into cuts.

    Neighbours of the stack top are scanned by ascending flipped bit.  Cheaper
    or equal ones are pushed; costlier ones become restrictions on their side.
    A top with nothing left to push is popped, recorded and cut from both
    sides.  ``limit`` stops a scan after that many consecutive costlier
    neighbours.
    """
    c = state.ledger
    view = state.view
    n = state.n
    stack = [m]
    on_stack = {m}
    state.emit("push", m, c(m))
    while stack:
        top = stack[-1]
        c_top = c(top)
        exhausted = True
        misses = 0
        for i in range(n):
            bit = 1 << i
            nb = top ^ bit
            if nb in on_stack or nb not in view:
                continue
            c_nb = c(nb)
            if c_nb <= c_top:
                stack.append(nb)
                on_stack.add(nb)
                state.emit("push", nb, c_nb)
                exhausted = False
                misses = 0
            else:
                state.restrict("upper" if nb & bit else "lower", nb, "exhaust")
                misses += 1
                if limit is not None and misses >= limit:
                    break
        if exhausted:
            stack.pop()
            on_stack.discard(top)
            state.emit("pop", top, c_top)
            state.record(top, c_top)
            state.restrict("lower", top, "pop")
            state.restrict("upper", top, "pop")
            if top.bit_count() <= n / 2:
                state.minima_lower += 1
            else:
                state.minima_upper += 1


def run_ucurve(cost: CostFunction, config: SearchConfig | None = None, trace: Trace | None = None) -> SearchOutcome:
    """Run the U-curve search.

    Without a budget or threshold the run stops only when the space is
    exhausted.  A budgeted run that hits its limit returns normally with
    ``complete=False`` and the cheapest node evaluated so far among the
    results.
    """
    config = config or SearchConfig()
    state = SearchState.start(cost, config, trace)
    reason = "exhausted"
    try:
        while not space_is_exhausted(state.lower, state.upper):
            state.iterations += 1
            direction = select_direction(state, config)
            state.emit("select", None, None, direction)
            if direction == "down_up":
                down_up_direction(state, config)
            else:
                up_down_direction(state, config)
    except StopSearch as stop:
        reason = stop.reason
        cache = state.ledger.cache
        best = min(cache, key=lambda s: (cache[s], format_subset(s, state.n)))
        state.record(best, cache[best])
    return SearchOutcome(state.results, state.ledger, reason == "exhausted", reason, state.iterations, state)
