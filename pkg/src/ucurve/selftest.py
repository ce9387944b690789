"""Built-in correctness checks: search vs. full enumeration, restriction-set laws."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .baselines import exhaustive
from .cost import synth_u_instance
from .lattice import RestrictionSet, format_subset, in_lower_space, in_upper_space, maximal_element, minimal_element
from .search import SearchConfig, run_ucurve

Log = Callable[[str], object]


@dataclass
class Summary:
    oracle_matches: int = 0
    oracle_trials: int = 0
    property_cases: int = 0
    plateau_matches: int = 0
    plateau_trials: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _sizes(n_max: int) -> list[int]:
    lo = min(4, n_max)
    return list(range(max(2, lo), max(2, n_max) + 1))


def _oracle_case(n: int, seed: int, plateaus: bool) -> str | None:
    cost = synth_u_instance(n, seed, plateaus=plateaus)
    ucc = run_ucurve(cost, SearchConfig(seed=seed))
    ref = exhaustive(cost)
    if ucc.best_cost == ref.best_cost:
        return None
    return (
        f"oracle mismatch: n={n} seed={seed} plateaus={plateaus}\n"
        f"  search best {format_subset(ucc.best_subset, n)} cost={ucc.best_cost!r}\n"
        f"  exhaustive  {format_subset(ref.best_subset, n)} cost={ref.best_cost!r}\n"
        f"  lower restrictions: {ucc.state.lower.dumps().split()}\n"
        f"  upper restrictions: {ucc.state.upper.dumps().split()}"
    )


def _random_set(kind: str, n: int, rng: random.Random) -> RestrictionSet:
    return RestrictionSet(kind, n, (rng.getrandbits(n) for _ in range(rng.randint(0, 6))))  # type: ignore[arg-type]


def _property_case(n: int, seed: int) -> str | None:
    """Membership agrees with the definition; minimal/maximal elements are extremal."""
    rng = random.Random(seed)
    full = (1 << n) - 1
    lower = _random_set("lower", n, rng)
    upper = _random_set("upper", n, rng)
    a = rng.getrandbits(n)

    def dump() -> str:
        return f"n={n} seed={seed} A={format_subset(a, n)} lower={lower.dumps().split()} upper={upper.dumps().split()}"

    if in_lower_space(a, lower) != all(a & ~r for r in lower):
        return "lower membership disagrees with definition: " + dump()
    if in_upper_space(a, upper) != all(r & ~a for r in upper):
        return "upper membership disagrees with definition: " + dump()
    # dual: complements swap the two sides
    mirrored = RestrictionSet("upper", n, (full & ~r for r in lower))
    if in_lower_space(a, lower) != in_upper_space(full & ~a, mirrored):
        return "complement duality broken: " + dump()

    m = minimal_element(lower, random.Random(seed))
    if in_lower_space(full, lower):
        if not in_lower_space(m, lower):
            return f"minimal element {format_subset(m, n)} outside the space: " + dump()
        for i in range(n):
            if m >> i & 1 and in_lower_space(m & ~(1 << i), lower):
                return f"minimal element {format_subset(m, n)} is not minimal: " + dump()
    x = maximal_element(upper, random.Random(seed))
    if in_upper_space(0, upper):
        if not in_upper_space(x, upper):
            return f"maximal element {format_subset(x, n)} outside the space: " + dump()
        for i in range(n):
            if not x >> i & 1 and in_upper_space(x | 1 << i, upper):
                return f"maximal element {format_subset(x, n)} is not maximal: " + dump()
    return None


def run(n_max: int = 12, trials: int = 200, seed: int = 0, log: Log = print) -> Summary:
    """Oracle equivalence, restriction-set properties and flat-step instances.

    Trial ``i`` uses seed ``seed + i`` and a lattice degree cycling through
    ``4..n_max``.  Every failure is logged with enough state to replay it.
    """
    s = Summary()
    sizes = _sizes(n_max)
    for i in range(trials):
        n = sizes[i % len(sizes)]
        s.oracle_trials += 1
        err = _oracle_case(n, seed + i, plateaus=False)
        if err:
            s.failures.append(err)
        else:
            s.oracle_matches += 1
    log(f"{s.oracle_matches}/{s.oracle_trials} oracle matches\n")

    for i in range(trials):
        n = sizes[i % len(sizes)]
        s.plateau_trials += 1
        err = _oracle_case(n, seed + i, plateaus=True)
        if err:
            s.failures.append(err)
        else:
            s.plateau_matches += 1
    log(f"{s.plateau_matches}/{s.plateau_trials} flat-step oracle matches\n")

    bad = 0
    for i in range(5 * trials):
        n = sizes[i % len(sizes)]
        s.property_cases += 1
        err = _property_case(n, seed + i)
        if err:
            s.failures.append(err)
            bad += 1
    log(f"{s.property_cases - bad}/{s.property_cases} restriction-set property cases\n")

    for f in s.failures[:5]:
        log("COUNTEREXAMPLE " + f + "\n")
    log("selftest " + ("passed" if s.ok else f"FAILED ({len(s.failures)} failures)") + "\n")
    return s


