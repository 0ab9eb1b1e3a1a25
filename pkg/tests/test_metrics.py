import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nsga2_approx.core import RngHandle
from nsga2_approx.metrics import (
    FrontSubset, ReferencePoint, eps_exact, eps_lower, eps_upper, even_spread, hv_bounds, hv_constant,
    hv_exact, hv_opt_bounds, hv_union_oracle, mei, mei_of_values, mei_opt, metric_report,
)

TOL = 1e-9


def S(n, *values):
    return FrontSubset.of(n, values)


def extreme_subsets(n, max_size):
    """Every subset of [0..n] containing 0 and n with at most ``max_size`` elements."""
    inner = range(1, n)
    for k in range(0, max(0, max_size - 2) + 1):
        for combo in itertools.combinations(inner, k):
            yield FrontSubset(n, (0, *combo, n))


def random_extreme_subset(n, rng):
    inner = [k for k in range(1, n) if rng.coin()]
    return FrontSubset.of(n, [0, n, *inner])


def test_front_subset_validation():
    with pytest.raises(ValueError):
        FrontSubset(5, ())
    with pytest.raises(ValueError):
        FrontSubset(5, (2, 1))
    with pytest.raises(ValueError):
        FrontSubset(5, (0, 6))
    assert S(5, 3, 0, 3).values == (0, 3)
    with pytest.raises(ValueError):
        ReferencePoint(1, 0)


def test_mei_examples():
    assert mei(S(6, *range(7))) == 1
    assert mei(S(6, 0, 3, 6)) == 3
    assert mei(S(6, 0, 4, 6)) == 4
    assert mei(S(6, 2)) == 0
    with pytest.raises(ValueError):
        mei_of_values([])


@given(st.lists(st.integers(0, 50), min_size=1, max_size=20), st.randoms())
def test_mei_ignores_order_and_duplicates(values, rnd):
    shuffled = values + values
    rnd.shuffle(shuffled)
    assert mei_of_values(shuffled) == mei(FrontSubset.of(50, values))


def test_mei_opt_examples():
    assert [mei_opt(601, N) for N in (301, 151, 76)] == [3, 5, 9]
    assert mei_opt(6, 7) == 1
    assert mei_opt(12, 4) == 4
    with pytest.raises(ValueError):
        mei_opt(5, 1)


@pytest.mark.parametrize("n", range(1, 13))
def test_mei_opt_matches_enumeration(n):
    for N in range(2, 7):
        best = min(mei(s) for s in extreme_subsets(n, N))
        assert mei_opt(n, N) == best
        assert mei(even_spread(n, N)) == best


def test_eps_examples():
    full = S(10, *range(11))
    assert eps_upper(full) == pytest.approx(1 / 9, abs=TOL)
    assert eps_lower(full) == 0 and eps_exact(full) == 0
    assert eps_upper(S(6, 0, 3, 6)) == pytest.approx(1.0, abs=TOL)
    assert eps_upper(S(6, 0, 4, 6)) == pytest.approx(2.0, abs=TOL)
    assert eps_lower(S(6, 0, 3, 6)) == pytest.approx(2 / 3, abs=TOL)
    assert eps_lower(S(6, 0, 4, 6)) == pytest.approx(1.5, abs=TOL)
    assert eps_exact(S(6, 0, 3, 6)) == pytest.approx(2 / 3, abs=TOL)


def test_eps_errors():
    for f in (eps_upper, eps_lower, eps_exact):
        with pytest.raises(ValueError):
            f(S(6, 0, 3))
    with pytest.raises(ValueError):
        eps_upper(S(6, 0, 6))
    with pytest.raises(ValueError):
        eps_lower(S(6, 0, 6))


def _eps_reference(s):
    """Scalar brute force straight from the definition."""
    n = s.n
    worst = 0.0
    for k in range(n + 1):
        best = math.inf
        for j in s.values:
            need = 0.0
            for u, v in ((j, k), (n - j, n - k)):
                if v > u:
                    need = max(need, math.inf if u == 0 else v / u - 1)
            best = min(best, need)
        worst = max(worst, best)
    return worst


def test_eps_exact_matches_scalar_definition():
    rng = RngHandle(17)
    for _ in range(200):
        s = random_extreme_subset(2 + rng.below(25), rng)
        assert eps_exact(s) == pytest.approx(_eps_reference(s), abs=TOL)


@pytest.mark.parametrize("n", [10, 40])
def test_eps_sandwich(n):
    rng = RngHandle(n)
    for _ in range(200):
        s = random_extreme_subset(n, rng)
        if mei(s) == n:
            continue
        assert eps_lower(s) - TOL <= eps_exact(s) <= eps_upper(s) + TOL


def test_hv_examples():
    assert hv_exact(S(2, 0, 1, 2)) == 1.0
    assert hv_union_oracle(S(2, 0, 1, 2)) == 1.0
    assert hv_exact(S(6, 0, 3, 6), ReferencePoint(-1, -1)) == 22.0
    assert hv_exact(S(6, 0, 6)) == 0.0
    assert hv_union_oracle(S(7, 3)) == 12.0
    assert hv_constant(6, ReferencePoint(-1, -1)) == 31.0
    with pytest.raises(ValueError):
        hv_exact(S(6, 0, 3))


def test_hv_bounds_examples():
    assert hv_bounds(S(6, 0, 3, 6)) == (9.0, 16.5)
    assert hv_exact(S(6, 0, 3, 6)) == 9.0
    full = S(8, *range(9))
    lo, hi = hv_bounds(full)
    assert hv_exact(full) == 32 - 4
    assert lo <= hv_exact(full) <= hi
    assert hv_opt_bounds(12, 4) == (48.0, 70.0)
    with pytest.raises(ValueError):
        hv_opt_bounds(5, 1)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 30])
def test_hv_exact_matches_union(n):
    rng = RngHandle(n)
    for _ in range(100):
        s = random_extreme_subset(n, rng)
        r = ReferencePoint(-rng.below(4), -rng.below(4))
        assert abs(hv_exact(s, r) - hv_union_oracle(s, r)) <= TOL
        if len(s.values) >= 2:
            lo, hi = hv_bounds(s, r)
            assert lo - TOL <= hv_exact(s, r) <= hi + TOL


@given(st.lists(st.integers(0, 20), min_size=1, max_size=10), st.integers(0, 20))
def test_union_is_monotone(values, extra):
    s = FrontSubset.of(20, values)
    assert hv_union_oracle(FrontSubset.of(20, [*values, extra])) >= hv_union_oracle(s)


@pytest.mark.parametrize("n", range(1, 13))
def test_hv_opt_bounds_contain_enumerated_optimum(n):
    for N in range(2, 6):
        best = max(hv_union_oracle(s) for s in extreme_subsets(n, N))
        lo, hi = hv_opt_bounds(n, N)
        assert lo - TOL <= best <= hi + TOL
        assert lo <= hv_exact(even_spread(n, N)) + TOL


@given(st.integers(1, 500), st.integers(2, 400))
def test_hv_opt_bounds_are_ordered(n, N):
    lo, hi = hv_opt_bounds(n, N)
    assert lo <= hi


def test_even_spread_shape():
    assert even_spread(10, 4).values == (0, 4, 8, 10)
    assert even_spread(6, 7).values == tuple(range(7))


def test_metric_report():
    rep = metric_report(S(8, 0, 2, 5, 8))
    assert (rep.mei, rep.size, rep.has_extremes, rep.singleton) == (3, 4, True, False)
    assert rep.eps_lower == pytest.approx(0.4) and rep.eps_upper == pytest.approx(0.6)
    assert rep.eps_exact == pytest.approx(0.5) and rep.hv == 21.0
    partial = metric_report(S(8, 2, 5))
    assert partial.eps_exact is None and partial.hv == hv_union_oracle(S(8, 2, 5))
    single = metric_report(S(8, 4))
    assert single.singleton and single.mei == 0
    degenerate = metric_report(S(8, 0, 8))
    assert degenerate.eps_upper is None and degenerate.hv == 0.0
    assert metric_report(S(8, 0, 2, 5, 8)).to_dict()["mei"] == 3
