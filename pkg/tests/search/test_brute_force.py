import pytest

from ergoalloc.core import SearchTooLargeError, build_scarce, build_sequential, prune
from ergoalloc.search import count_plans, enumerate_plans


def catalan(n: int) -> int:
    out = 1
    for k in range(n):
        out = out * 2 * (2 * k + 1) // (k + 2)
    return out


def test_sequential_three_pieces():
    g = build_sequential(3, 2)
    plans = enumerate_plans(g)
    assert len(plans) == 8
    assert len({p.arcs() for p in plans}) == 8
    for plan in plans:
        assert len(plan) == 2
        assert plan.steps[-1].config.is_final()


def test_scarce_single_agent():
    g = build_scarce(3, 1)
    assert count_plans(g) == 1
    (plan,) = enumerate_plans(g)
    assert [g.actions[a] for a, _ in plan.pairs()] == ["attach[p1]", "attach[p2]"]


@pytest.mark.parametrize("m", range(2, 8))
@pytest.mark.parametrize("agents", [1, 2, 3])
def test_counts(m, agents):
    # binary bracketings of the chain, one agent per join
    expected = catalan(m - 1) * agents ** (m - 1)
    assert count_plans(build_sequential(m, agents)) == expected
    assert count_plans(build_scarce(m, agents)) == agents ** (m - 1)


def test_count_with_prune():
    g = build_sequential(3, 2)
    prune(g, 0, "robot")
    assert count_plans(g) == 6
    assert len(enumerate_plans(g)) == 6


def test_limit():
    g = build_sequential(8, 3)
    with pytest.raises(SearchTooLargeError):
        enumerate_plans(g, limit=1000)
