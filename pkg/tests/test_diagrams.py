import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spde_moments import diagrams as dg
from spde_moments import moments as mm
from spde_moments.diagrams import FeynmanDiagram, Partition
from spde_moments.errors import InvalidParams, NotBalanced, TooLarge
from spde_moments.model import ModelParams, big_theta, theta


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


SHE = ModelParams(alpha=2, beta=1, gamma=0, lam=1, nu=1, dim=1, u0=1)


def brute_force_matchings(partition: Partition):
    """Independent oracle: all pairings of the vertex list via fixed-point
    recursion over raw pairs, filtered to cross-column edges."""
    verts = partition.vertices()
    if len(verts) % 2:
        return set()

    def pairings(items):
        if not items:
            yield ()
            return
        first = items[0]
        for i in range(1, len(items)):
            rest = items[1:i] + items[i + 1 :]
            for sub in pairings(rest):
                yield ((first, items[i]),) + sub

    out = set()
    for cand in pairings(tuple(verts)):
        if any(a[0] == b[0] for a, b in cand):
            continue
        edges = frozenset((a, b) if a[0] < b[0] else (b, a) for a, b in cand)
        out.add(edges)
    return out


# Example 5.1 fixtures over the partition (1, 2, 2, 3)
PART_1223 = Partition((1, 2, 2, 3))
D1 = FeynmanDiagram(
    PART_1223,
    frozenset([((1, 1), (2, 1)), ((3, 1), (4, 2)), ((3, 2), (4, 1)), ((2, 2), (4, 3))]),
)
D2 = FeynmanDiagram(
    PART_1223,
    frozenset([((1, 1), (3, 1)), ((2, 1), (4, 1)), ((2, 2), (4, 2)), ((3, 2), (4, 3))]),
)


class TestAdmissible:
    def test_pair_column_forced(self):
        assert len(dg.enumerate_admissible(Partition((1, 1)))) == 1

    def test_two_by_two(self):
        assert len(dg.enumerate_admissible(Partition((2, 2)))) == 2

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_square_counts_factorial(self, n):
        got = dg.enumerate_admissible(Partition((n, n)))
        assert len(got) == math.factorial(n)
        assert len(brute_force_matchings(Partition((n, n)))) == math.factorial(n)

    def test_against_brute_force(self):
        part = PART_1223
        mine = {d.edges for d in dg.enumerate_admissible(part)}
        assert mine == brute_force_matchings(part)

    def test_every_diagram_admissible(self):
        for d in dg.enumerate_admissible(Partition((1, 2, 2, 1))):
            assert d.is_admissible()
            for (k1, _), (k2, _) in d.edges:
                assert k1 < k2

    def test_odd_total_rejected(self):
        with pytest.raises(InvalidParams):
            dg.enumerate_admissible(Partition((1, 2)))

    def test_cap(self):
        with pytest.raises(TooLarge):
            dg.enumerate_admissible(Partition((7, 7)))


class TestBalanced:
    def test_examples_p4_m3(self):
        assert dg.is_balanced_partition(Partition((1, 2, 2, 1)), 4, 3)
        assert dg.is_balanced_partition(Partition((2, 1, 2, 1)), 4, 3)
        assert dg.is_balanced_partition(Partition((1, 2, 1, 2)), 4, 3)
        assert not dg.is_balanced_partition(Partition((1, 1, 2, 2)), 4, 3)

    def test_example_p6_m7(self):
        assert dg.is_balanced_partition(Partition((3, 2, 2, 2, 3, 2)), 6, 7)

    def test_unique_balanced_p4_m4(self):
        assert dg.is_balanced_partition(Partition((2, 2, 2, 2)), 4, 4)
        assert [q.n for q in dg.balanced_partitions(4, 4)] == [(2, 2, 2, 2)]

    def test_square_column_count(self):
        for n in range(1, 6):
            diags = dg.enumerate_balanced(Partition((n, n)), 2, n)
            assert len(diags) == 1  # horizontal edges forced level by level

    def test_p6_m7_count(self):
        diags = dg.enumerate_balanced(Partition((3, 2, 2, 2, 3, 2)), 6, 7)
        assert len(diags) >= 36
        assert all(d.is_admissible() for d in diags)

    def test_balanced_subset_of_admissible(self):
        part = Partition((2, 1, 2, 1))
        admissible = {d.edges for d in dg.enumerate_admissible(part)}
        for d in dg.enumerate_balanced(part, 4, 3):
            assert d.edges in admissible

    def test_not_balanced_raises(self):
        with pytest.raises(NotBalanced):
            dg.enumerate_balanced(Partition((1, 1, 2, 2)), 4, 3)

    def test_count_lower_bound_values(self):
        assert dg.count_lower_bound(6, 7) == 36
        assert dg.count_lower_bound(4, 2) == 2
        for n in range(1, 6):
            assert dg.count_lower_bound(2, n) == 1 <= math.factorial(n)

    def test_aggregate_inequality(self):
        for p in (2, 4, 6):
            for m in range(p // 2, 9):
                if (2 * m) % p % 2:
                    continue
                assert dg.count_balanced(p, m) >= dg.count_lower_bound(p, m), (p, m)


class TestCrossing:
    def test_example_pair(self):
        assert dg.crossing_vanishes(D1) is True
        assert dg.crossing_vanishes(D2) is False

    def test_balanced_never_crosses(self):
        for part in dg.balanced_partitions(4, 3):
            for d in dg.enumerate_balanced(part, 4, 3):
                assert not dg.crossing_vanishes(d)

    def test_crossing_zeroes_discrete_weight(self):
        for d in dg.enumerate_admissible(PART_1223):
            if dg.crossing_vanishes(d):
                assert dg.simplex_weight_count(d, grid=4) == 0

    def test_example_weights(self):
        assert dg.simplex_weight_count(D1) == 0
        assert dg.simplex_weight_count(D2) > 0


class TestSerialization:
    def test_roundtrip_fixture(self):
        line = dg.diagram_to_line(D1)
        assert line.startswith("4 4 | 1,2,2,3 | ")
        assert dg.diagram_from_line(line) == D1

    @given(st.integers(min_value=1, max_value=3))
    def test_roundtrip_squares(self, n):
        for d in dg.enumerate_admissible(Partition((n, n))):
            assert dg.diagram_from_line(dg.diagram_to_line(d)) == d

    def test_malformed(self):
        with pytest.raises(InvalidParams):
            dg.diagram_from_line("nonsense")
        with pytest.raises(InvalidParams):
            dg.diagram_from_line("4 3 | 1,2,2,3 | (1,1)-(2,1)")


class TestChaos:
    def test_level_zero(self):
        assert dg.chaos_term(SHE, 1.0, 0) == 1.0

    def test_she_level_one(self):
        # Theta Gamma(1/2) / Gamma(3/2) with Theta = 1/sqrt(4 pi) equals 1/sqrt(pi)
        assert rel(dg.chaos_term(SHE, 1.0, 1), 1.0 / math.sqrt(math.pi)) < 1e-9

    @pytest.mark.parametrize(
        "p,t",
        [
            (SHE, 0.5),
            (SHE, 1.0),
            (ModelParams(2, 2, 0, 1, 2, 1, u0=1.3), 1.0),
            (ModelParams(3, 1, 0, 1, 1, 1, u0=0.7), 2.0),
        ],
    )
    def test_partial_sums_match_second_moment(self, p, t):
        from spde_moments.model import t_hat

        assert p.lam**2 * t_hat(p, t) <= 5.0
        total = sum(dg.chaos_term(p, t, k) for k in range(31))
        assert rel(total, mm.second_moment(p, t)) < 1e-10

    def test_single_edge_diagram_weight_is_level_one(self):
        # lam^2 Theta int_0^t (t-s)^theta J0(s)^2 ds collapses to the k=1 term
        from scipy import integrate

        p = ModelParams(2, 1, 0, 1.4, 1.3, 1, u0=0.8)
        th = theta(p)
        t = 1.7
        val, _ = integrate.quad(
            lambda u: 2.0 * u * (u * u) ** th * p.u0**2, 0.0, math.sqrt(t)
        )  # s = t - u^2 substitution for the endpoint singularity
        weight = p.lam**2 * big_theta(p) * val
        assert rel(weight, dg.chaos_term(p, t, 1)) < 1e-9

    def test_mc_levels_within_three_se(self):
        for k in (1, 2, 3):
            est, se = dg.chaos_term_mc(SHE, 1.0, k, 100_000, seed=11 + k)
            exact = dg.chaos_term(SHE, 1.0, k)
            assert abs(est - exact) <= 3.0 * se, (k, est, exact, se)

    def test_mc_wave_slice(self):
        p = ModelParams(2, 2, 0, 1, 2, 1, u0=1.0)
        est, se = dg.chaos_term_mc(p, 0.8, 2, 60_000, seed=5)
        exact = dg.chaos_term(p, 0.8, 2)
        assert abs(est - exact) <= 3.0 * se

    def test_mc_vanishing_lambda(self):
        p = ModelParams(2, 1, 0, 1e-8, 1, 1, u0=1.0)
        est, _ = dg.chaos_term_mc(p, 1.0, 2, 1000, seed=1)
        assert abs(est) < 1e-30

    def test_mc_reproducible(self):
        a = dg.chaos_term_mc(SHE, 1.0, 2, 5000, seed=9)
        b = dg.chaos_term_mc(SHE, 1.0, 2, 5000, seed=9)
        assert a == b

    def test_mc_cap(self):
        with pytest.raises(TooLarge):
            dg.chaos_term_mc(SHE, 1.0, 5, 100, seed=0)


class TestExpTailFacts:
    def test_half_ratio_large_n(self):
        out = dg.exp_tail_facts(1000, 1.0)
        assert 0.48 <= out["half_ratio"] <= 0.52

    def test_tail_bound_small_case(self):
        assert dg.exp_tail_facts(20, 1.0)["tail_lb_ok"]

    @given(
        st.integers(min_value=50, max_value=500),
        st.floats(min_value=0.2, max_value=3.0),
    )
    def test_tail_bound_witnesses(self, n, a):
        assert dg.exp_tail_facts(n, a)["tail_lb_ok"]

    def test_stirling_sandwich(self):
        assert all(dg.stirling_sandwich_holds(n) for n in range(1, 171))

    def test_validation(self):
        with pytest.raises(InvalidParams):
            dg.exp_tail_facts(5, 1.0)
        with pytest.raises(InvalidParams):
            dg.exp_tail_facts(100, 0.0)
