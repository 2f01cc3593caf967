import itertools
import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from mixedwidths import (
    BlockMatrix,
    BlockShape,
    Exponent,
    SpreadOperator,
    apply_spread,
    approximate,
    best_k_term,
    ceil_power,
    check_one_column_bound,
    choose_pipeline_params,
    d0_mixed,
    extreme_points_inf1,
    good_partition,
    grouped_subspace_approximate,
    lq_norm,
    mixed_norm,
    partition_from_sets,
    sample_ball,
    singleton_partition,
    spread_error_coefficient,
    transposition_partition,
    verify_partition,
)


def _transposition_image(x: BlockMatrix) -> np.ndarray:
    """Dense oracle for the transposition spread: x + x^T with the diagonal
    kept once."""
    mat = x.as_matrix()
    out = mat + mat.T
    np.fill_diagonal(out, np.diagonal(mat))
    return out


class TestSpreadOperator:
    def test_singleton_is_identity(self):
        x = BlockMatrix.from_matrix(np.arange(12.0).reshape(3, 4))
        op = SpreadOperator(singleton_partition(3, 4))
        assert np.array_equal(op.apply(x).entries, x.entries)

    def test_row_partition_spreads_rows(self):
        part = partition_from_sets([list(range(4))] * 3, 3, 4)
        x = BlockMatrix.one_column(BlockShape(3, 4), 0, [1, 0, 0])
        image = apply_spread(part, x).as_matrix()
        assert np.array_equal(image, [[1, 1, 1, 1], [0, 0, 0, 0], [0, 0, 0, 0]])

    def test_transposition_matches_dense_oracle(self):
        rng = np.random.default_rng(21)
        part = transposition_partition(5)
        op = SpreadOperator(part)
        for _ in range(50):
            x = BlockMatrix(BlockShape(5, 5), rng.standard_normal(25))
            assert np.allclose(op.apply(x).as_matrix(), _transposition_image(x), atol=1e-15)

    def test_linearity(self):
        rng = np.random.default_rng(22)
        op = SpreadOperator(good_partition(8, 8, 2))
        for _ in range(100):
            x = BlockMatrix(BlockShape(8, 8), rng.standard_normal(64))
            y = BlockMatrix(BlockShape(8, 8), rng.standard_normal(64))
            a, b = rng.standard_normal(2)
            lhs = op.apply(a * x + b * y).entries
            rhs = a * op.apply(x).entries + b * op.apply(y).entries
            assert np.allclose(lhs, rhs, atol=1e-12)

    def test_range_constant_on_groups(self):
        rng = np.random.default_rng(23)
        part = good_partition(9, 7, 2)
        op = SpreadOperator(part)
        x = BlockMatrix(BlockShape(9, 7), rng.standard_normal(63))
        image = op.apply(x).as_matrix()
        for group in part.groups:
            values = {image[i, j] for (i, j) in group}
            assert len(values) == 1

    def test_dim_counts_nonempty_groups(self):
        part = good_partition(16, 16, 2)
        assert SpreadOperator(part).dim == part.m

    def test_shape_mismatch_rejected(self):
        op = SpreadOperator(singleton_partition(2, 2))
        with pytest.raises(ValueError):
            op.apply(BlockMatrix.zeros(BlockShape(3, 2)))

    def test_partition_must_cover(self):
        from mixedwidths import Partition

        gappy = Partition(BlockShape(2, 2), (((0, 0),), ((1, 1),)), r=1, l=0)
        with pytest.raises(ValueError):
            SpreadOperator(gappy)


class TestErrorCoefficient:
    def test_singleton_p1_is_zero(self):
        part = singleton_partition(4, 4)
        assert spread_error_coefficient(part, 1, 1, 2) == 0.0

    def test_transposition_sup_to_12(self):
        part = transposition_partition(9)
        assert spread_error_coefficient(part, "inf", 1, 2) == pytest.approx(3.0, abs=1e-12)

    def test_good_16_16_2(self):
        part = good_partition(16, 16, 2)
        assert spread_error_coefficient(part, "inf", 1, 2) == pytest.approx(16.0, abs=1e-12)


class TestOneColumnBound:
    def test_zero_vector(self):
        part = transposition_partition(3)
        x = BlockMatrix.zeros(BlockShape(3, 3))
        check = check_one_column_bound(part, 1, 1, 2, x)
        assert check.ok and check.lhs == 0.0 and check.rhs == 0.0

    def test_extreme_column_near_tight(self):
        s = 8
        part = transposition_partition(s)
        x = BlockMatrix.one_column(BlockShape(s, s), 2, np.ones(s))
        check = check_one_column_bound(part, "inf", 1, 2, x)
        assert check.lhs == pytest.approx(math.sqrt(s - 1), abs=1e-12)
        assert check.rhs == pytest.approx(math.sqrt(s), abs=1e-12)
        assert check.ok

    def test_randomized_certification(self):
        rng = np.random.default_rng(31)
        partitions = [
            good_partition(12, 12, 2),
            transposition_partition(10),
            singleton_partition(6, 9),
        ]
        configs = [
            (p, q1, q2)
            for p in (1, 2, "inf")
            for (q1, q2) in ((1, 2), (1, 1), (2, 2), (2, "inf"))
        ]
        for part in partitions:
            op = SpreadOperator(part)
            s, b = part.shape.s, part.shape.b
            for (p, q1, q2) in configs:
                for _ in range(100):
                    j = int(rng.integers(0, b))
                    x = BlockMatrix.one_column(part.shape, j, rng.standard_normal(s))
                    assert check_one_column_bound(part, p, q1, q2, x, op=op).ok

    def test_multi_column_support_rejected(self):
        part = transposition_partition(3)
        x = BlockMatrix.from_matrix(np.ones((3, 3)))
        with pytest.raises(ValueError):
            check_one_column_bound(part, 1, 1, 2, x)


class TestBestKTerm:
    def test_keep_largest(self):
        result = best_k_term([3, 2, 1], 1, "inf")
        assert result.error == 2.0 and result.support == (0,)

    def test_budget_covers_support(self):
        result = best_k_term([0, 5, 0, -1], 2, 2)
        assert result.error == 0.0 and result.support == (1, 3)

    def test_ties_take_lowest_index(self):
        result = best_k_term([1.0, -1.0, 1.0], 2, 1)
        assert result.support == (0, 1)

    def test_budget_validated(self):
        with pytest.raises(ValueError):
            best_k_term([1, 2], 3, 1)

    def test_greedy_matches_brute_force(self):
        rng = np.random.default_rng(32)
        for _ in range(60):
            n = int(rng.integers(1, 8))
            y = rng.standard_normal(n)
            for q in (1, 2, "inf"):
                qe = Exponent.of(q)
                for k in range(n + 1):
                    best = min(
                        lq_norm(
                            [y[i] for i in range(n) if i not in set(supp)], qe
                        )
                        for supp in itertools.combinations(range(n), k)
                    )
                    assert best_k_term(y, k, qe).error == pytest.approx(best, abs=1e-12)

    def test_decay_inequality_spot(self):
        rng = np.random.default_rng(33)
        p, q = Exponent.of(1), Exponent.of(2)
        for _ in range(300):
            y = rng.standard_normal(int(rng.integers(1, 20)))
            k = int(rng.integers(1, y.size + 1))
            bound = float(k) ** (-float(p.recip - q.recip)) * lq_norm(y, p)
            assert best_k_term(y, k - 1, q).error <= bound + 1e-9


class TestChooseParams:
    def test_square_example_tuple(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 256, 256)
        assert params.alpha == Fraction(1, 2)
        assert params.d == 4
        assert params.k == 2

    def test_k_grows_with_b(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 10**6, 10**6)
        assert params.k == ceil_power(10**6, Fraction(1, 8))

    def test_non_exceptional_rejected_with_reason(self):
        with pytest.raises(ValueError, match="q1 < p1"):
            choose_pipeline_params(2, 2, 2, 2, 4, 4)
        with pytest.raises(ValueError, match="q2 <= 2"):
            choose_pipeline_params("inf", 1, 1, 3, 4, 4)

    def test_d_rule_minimal(self):
        # alpha = 1/q1 - 1/q2 when p1 = inf and q2 <= 2 <= p1
        params = choose_pipeline_params("inf", 1, "4/3", 2, 16, 16)
        alpha = Fraction(3, 4) - Fraction(1, 2)
        assert params.alpha == alpha
        d = params.d
        assert Fraction(1, d) * Fraction(3, 4) <= alpha / 2
        assert d == 2 or Fraction(1, d - 1) * Fraction(3, 4) > alpha / 2


class TestApproximate:
    def test_zero_input(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 4, 4)
        part = transposition_partition(4)
        res = approximate(BlockMatrix.zeros(BlockShape(4, 4)), params, part)
        assert res.measured_error == 0.0 and res.certified_bound == 0.0

    def test_single_column_within_budget(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 8, 8)
        part = good_partition(8, 8, params.d)
        x = BlockMatrix.one_column(BlockShape(8, 8), 5, np.ones(8))
        res = approximate(x, params, part)
        assert res.tail_error == 0.0
        assert res.selected_columns == (5,)
        direct = mixed_norm(x - apply_spread(part, x), (1, 2))
        assert res.measured_error == pytest.approx(direct, abs=1e-15)

    def test_square_example_exact_values(self):
        s = 16
        params = choose_pipeline_params("inf", 1, 1, 2, s, s)
        part = transposition_partition(s)
        x = extreme_points_inf1(BlockShape(s, s), seed=5, count=1)[0]
        res = approximate(x, params, part)
        assert res.measured_error == pytest.approx(math.sqrt(s - 1), abs=1e-12)
        assert res.certified_bound == pytest.approx(math.sqrt(s), abs=1e-12)
        d0 = d0_mixed(BlockShape(s, s), "inf", 1, 1, 2)
        assert res.certified_bound / d0 == pytest.approx(1 / math.sqrt(s), abs=1e-12)
        assert res.dim == s * (s + 1) // 2

    def test_certified_dominates_measured_on_samples(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 16, 16)
        part = good_partition(16, 16, params.d)
        op = SpreadOperator(part)
        points = sample_ball(BlockShape(16, 16), "inf", 1, seed=6, count=20)
        points += extreme_points_inf1(BlockShape(16, 16), seed=7, count=20)
        for x in points:
            res = approximate(x, params, part, op=op)
            assert res.measured_error <= res.certified_bound + 1e-9

    def test_residual_structure_for_one_column(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 16, 16)
        part = good_partition(16, 16, params.d)
        op = SpreadOperator(part)
        rng = np.random.default_rng(34)
        sizes = {k: len(g) for k, g in enumerate(part.groups)}
        for _ in range(50):
            j = int(rng.integers(0, 16))
            x = BlockMatrix.one_column(part.shape, j, rng.standard_normal(16))
            res = x - op.apply(x)
            nnz = (res.as_matrix() != 0).sum(axis=0)
            assert nnz[j] == 0
            assert (nnz <= part.l).all()
            expected = sum(
                sizes[op._group_index[j * 16 + i]] - 1 for i in range(16)
            )
            assert int((res.entries != 0).sum()) == expected
            assert max(sizes.values()) - 1 <= part.r - 1

    def test_ball_membership_enforced(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 4, 4)
        part = transposition_partition(4)
        x = BlockMatrix(BlockShape(4, 4), 2 * np.ones(16))
        with pytest.raises(ValueError):
            approximate(x, params, part)

    def test_shape_mismatch_rejected(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 4, 4)
        with pytest.raises(ValueError):
            approximate(BlockMatrix.zeros(BlockShape(4, 4)), params, transposition_partition(5))

    def test_oversized_budget_clamped(self):
        params = replace(choose_pipeline_params("inf", 1, 1, 2, 4, 4), k=100)
        part = transposition_partition(4)
        x = extreme_points_inf1(BlockShape(4, 4), seed=11, count=1)[0]
        res = approximate(x, params, part)
        assert res.tail_error == 0.0 and len(res.selected_columns) <= 4

    def test_json_payload(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 4, 4)
        part = transposition_partition(4)
        x = extreme_points_inf1(BlockShape(4, 4), seed=12, count=1)[0]
        payload = approximate(x, params, part).to_json_dict()
        assert set(payload) == {
            "selected_columns", "measured_error", "certified_bound", "dim", "tail_error",
        }


class TestGroupedApproximate:
    def test_narrow_grid_rejected(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 8, 8)
        with pytest.raises(ValueError):
            grouped_subspace_approximate(BlockMatrix.zeros(BlockShape(8, 8)), params)

    def test_zero_input(self):
        params = choose_pipeline_params("inf", 1, 1, 2, 4, 8)
        res = grouped_subspace_approximate(BlockMatrix.zeros(BlockShape(4, 8)), params)
        assert res.measured_error == 0.0

    def test_locality_of_supported_group(self):
        s, b = 8, 16
        params = choose_pipeline_params("inf", 1, 1, 2, s, b)
        rng = np.random.default_rng(35)
        column = rng.uniform(-1, 1, s) / s
        x = BlockMatrix.one_column(BlockShape(s, b), 3, column)
        res = grouped_subspace_approximate(x, params)
        # nothing placed outside the supported column group
        assert np.all(res.approximant.entries[s * s :] == 0)
        sub = BlockMatrix(BlockShape(s, s), x.entries[: s * s])
        sub_params = replace(params, k=max(1, ceil_power(s, params.alpha / 4)))
        single = approximate(sub, sub_params, good_partition(s, s, params.d))
        assert res.measured_error == single.measured_error
        assert np.array_equal(res.approximant.entries[: s * s], single.approximant.entries)

    def test_dimension_adds_over_groups(self):
        s, b = 8, 32
        params = choose_pipeline_params("inf", 1, 1, 2, s, b)
        x = sample_ball(BlockShape(s, b), "inf", 1, seed=8, count=1)[0]
        res = grouped_subspace_approximate(x, params)
        sub_params = replace(params, k=max(1, ceil_power(s, params.alpha / 4)))
        single = approximate(
            BlockMatrix.zeros(BlockShape(s, s)),
            sub_params,
            good_partition(s, s, params.d),
        )
        assert res.dim == 4 * single.dim

    def test_certified_dominates_measured(self):
        s, b = 8, 32
        params = choose_pipeline_params("inf", 1, 1, 2, s, b)
        points = sample_ball(BlockShape(s, b), "inf", 1, seed=9, count=10)
        points += extreme_points_inf1(BlockShape(s, b), seed=10, count=10)
        for x in points:
            res = grouped_subspace_approximate(x, params)
            assert res.measured_error <= res.certified_bound + 1e-9

    def test_ragged_final_group(self):
        s, b = 8, 20  # groups of widths 8, 8, 4
        params = choose_pipeline_params("inf", 1, 1, 2, s, b)
        for x in sample_ball(BlockShape(s, b), "inf", 1, seed=11, count=6):
            res = grouped_subspace_approximate(x, params)
            assert res.measured_error <= res.certified_bound + 1e-9

    def test_other_exceptional_tuple(self):
        s, b = 12, 12
        params = choose_pipeline_params(4, 1, 1, "3/2", s, b)
        part = good_partition(s, b, params.d)
        op = SpreadOperator(part)
        for x in sample_ball(BlockShape(s, b), 4, 1, seed=12, count=8):
            res = approximate(x, params, part, op=op)
            assert res.measured_error <= res.certified_bound + 1e-9


class TestTranspositionPartition:
    def test_smallest_case(self):
        part = transposition_partition(2)
        assert part.groups == (((0, 1), (1, 0)), ((0, 0),), ((1, 1),))

    def test_parameters(self):
        part = transposition_partition(4)
        assert part.m == 10 and part.r == 2 and part.l == 1
        assert verify_partition(part).ok

    def test_positive_size_required(self):
        with pytest.raises(ValueError):
            transposition_partition(0)
