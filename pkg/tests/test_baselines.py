import pytest

from oracles import brute_min
from ucurve.baselines import SffsConfig, exhaustive, sffs
from ucurve.cost import SyntheticUInstance, TrapCost, synth_u_instance
from ucurve.lattice import ConfigurationError
from ucurve.search import SearchConfig, run_ucurve


class Wide:
    n = 25

    def __call__(self, s):
        return 0.0


def test_sffs_on_size_only_cost():
    cost = SyntheticUInstance(6, [(k - 2) ** 2 for k in range(7)])
    out = sffs(cost, SffsConfig(delta=3))
    assert out.best_cost == 0 and bin(out.best_subset).count("1") == 2


def test_sffs_misses_the_trap_pair():
    trap = TrapCost()
    ref = exhaustive(trap)
    out = sffs(trap)
    assert ref.best_cost == -1.0
    assert out.best_cost == pytest.approx(-0.9)
    assert out.best_cost > ref.best_cost
    assert run_ucurve(trap, SearchConfig(seed=0)).best_cost == ref.best_cost


def test_exhaustive_counts_every_subset():
    cost = SyntheticUInstance(4, [4, 1, 0, 1, 4])
    out = exhaustive(cost)
    assert out.computed_nodes == 16 and out.best_cost == 0


def test_exhaustive_guard():
    with pytest.raises(ConfigurationError):
        exhaustive(Wide())


@pytest.mark.parametrize("seed", range(20))
def test_sffs_never_beats_the_optimum(seed):
    n = 4 + seed % 9
    cost = synth_u_instance(n, seed)
    best = brute_min(cost, n)
    assert sffs(cost).best_cost >= best
    assert exhaustive(cost).best_cost == best
    assert run_ucurve(cost, SearchConfig(seed=seed)).best_cost == best


def test_sffs_is_deterministic():
    cost = synth_u_instance(10, 4)
    a, b = sffs(cost), sffs(cost)
    assert (a.best_subset, a.best_cost, a.computed_nodes) == (b.best_subset, b.best_cost, b.computed_nodes)


def test_target_dimension_bounds_the_walk():
    cost = SyntheticUInstance(8, [-k for k in range(9)])
    out = sffs(cost, SffsConfig(delta=0, target_dim=3))
    assert max(bin(s).count("1") for s in out.ledger.cache) == 3
    assert bin(out.best_subset).count("1") == 3


def test_sffs_config_validation():
    with pytest.raises(ConfigurationError):
        SffsConfig(delta=-1)
