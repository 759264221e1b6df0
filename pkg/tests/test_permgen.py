"""Permutation generation and the lift/drop constructions."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynsketch.core import Permutation, ValidationError
from dynsketch.permgen import (
    PermutationSeed,
    drop_perm,
    lift_perm,
    multiple_drop_perm,
    multiple_lift_perm,
    random_permutation,
)

from _reference import drop_perm_loops, lift_perm_loops


@st.composite
def perm_and_slot(draw, max_dim=48):
    dim = draw(st.integers(min_value=1, max_value=max_dim))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    perm = random_permutation(dim, PermutationSeed(seed))
    slot = draw(st.integers(min_value=1, max_value=dim))
    return perm, slot


class TestRandomPermutation:
    def test_single_element(self):
        assert random_permutation(1, PermutationSeed(99)).as_tuple() == (1,)

    def test_deterministic_under_seed(self):
        a = random_permutation(17, PermutationSeed(5, 3))
        b = random_permutation(17, PermutationSeed(5, 3))
        c = random_permutation(17, PermutationSeed(5, 4))
        assert a == b
        assert a != c

    def test_zero_dim_rejected(self):
        with pytest.raises(ValidationError):
            random_permutation(0, PermutationSeed(1))

    def test_seed_fields_validated(self):
        with pytest.raises(ValidationError):
            PermutationSeed(-1)
        with pytest.raises(ValidationError):
            PermutationSeed(0, -2)

    def test_first_slot_rank_is_uniform(self):
        # Pr[rank of slot 1 == 1] should be 1/32 across many seeds.
        trials = 100_000
        hits = sum(
            1
            for t in range(trials)
            if random_permutation(32, PermutationSeed(123, t)).rank[0] == 1
        )
        assert abs(hits / trials - 1 / 32) <= 0.005


class TestLiftPerm:
    def test_worked_example(self):
        out = lift_perm(Permutation([6, 3, 1, 7, 2, 5, 4]), 2)
        assert out.as_tuple() == (7, 3, 4, 1, 8, 2, 6, 5)

    def test_identity_stays_identity(self):
        assert lift_perm(Permutation([1, 2, 3]), 2).as_tuple() == (1, 2, 3, 4)

    def test_two_element_case(self):
        assert lift_perm(Permutation([2, 1]), 1).as_tuple() == (2, 3, 1)

    def test_slot_out_of_range(self):
        with pytest.raises(ValidationError):
            lift_perm(Permutation([1, 2]), 3)
        with pytest.raises(ValidationError):
            lift_perm(Permutation([1, 2]), 0)

    @given(perm_and_slot())
    @settings(max_examples=200)
    def test_matches_loop_transcription(self, case):
        perm, slot = case
        expected = lift_perm_loops(list(perm.as_tuple()), slot)
        assert list(lift_perm(perm, slot).as_tuple()) == expected

    @given(perm_and_slot())
    @settings(max_examples=200)
    def test_is_bijection_and_keeps_slot_rank(self, case):
        perm, slot = case
        out = lift_perm(perm, slot)
        assert sorted(out.as_tuple()) == list(range(1, perm.dim + 2))
        assert out.value_at(slot) == perm.value_at(slot)

    @given(perm_and_slot())
    @settings(max_examples=100)
    def test_preserves_relative_order_of_survivors(self, case):
        perm, slot = case
        out = lift_perm(perm, slot)
        mapped = [i if i < slot else i + 1 for i in range(1, perm.dim + 1)]
        old = [perm.value_at(i) for i in range(1, perm.dim + 1)]
        new = [out.value_at(j) for j in mapped]
        assert np.array_equal(np.argsort(old), np.argsort(new))


class TestDropPerm:
    def test_worked_example(self):
        out = drop_perm(Permutation([6, 2, 1, 7, 3, 5, 4]), 5)
        assert out.as_tuple() == (5, 2, 1, 6, 4, 3)

    def test_identity_case(self):
        assert drop_perm(Permutation([1, 2, 3]), 2).as_tuple() == (1, 2)

    def test_drop_to_zero_dim(self):
        assert drop_perm(Permutation([1]), 1).dim == 0

    @given(perm_and_slot())
    @settings(max_examples=200)
    def test_matches_loop_transcription(self, case):
        perm, slot = case
        expected = drop_perm_loops(list(perm.as_tuple()), slot)
        assert list(drop_perm(perm, slot).as_tuple()) == expected

    @given(perm_and_slot())
    @settings(max_examples=200)
    def test_inverts_lift_at_same_slot(self, case):
        perm, slot = case
        assert drop_perm(lift_perm(perm, slot), slot) == perm

    def test_inverts_lift_on_worked_example(self):
        perm = Permutation([6, 3, 1, 7, 2, 5, 4])
        assert drop_perm(lift_perm(perm, 2), 2) == perm


@st.composite
def perm_and_batch(draw, max_dim=40, max_n=8):
    dim = draw(st.integers(min_value=1, max_value=max_dim))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    perm = random_permutation(dim, PermutationSeed(seed))
    n = draw(st.integers(min_value=1, max_value=min(dim, max_n)))
    positions = tuple(sorted(draw(
        st.sets(st.integers(1, dim), min_size=n, max_size=n)
    )))
    return perm, positions


class TestMultipleLiftPerm:
    def test_worked_example(self):
        out = multiple_lift_perm(Permutation([6, 3, 1, 7, 2, 5, 4]), (2, 4))
        assert out.as_tuple() == (7, 3, 4, 1, 8, 9, 2, 6, 5)

    def test_identity_batch(self):
        out = multiple_lift_perm(Permutation([1, 2, 3, 4]), (1, 3))
        assert out.as_tuple() == (1, 2, 3, 4, 5, 6)

    @given(perm_and_batch())
    @settings(max_examples=150)
    def test_single_fold_equals_lift(self, case):
        perm, positions = case
        m = positions[0]
        assert multiple_lift_perm(perm, (m,)) == lift_perm(perm, m)

    @given(perm_and_batch())
    @settings(max_examples=150)
    def test_round_trip_through_multiple_drop(self, case):
        perm, positions = case
        widened = multiple_lift_perm(perm, positions)
        landed = tuple(m + i for i, m in enumerate(positions))
        assert multiple_drop_perm(widened, landed) == perm


class TestMultipleDropPerm:
    def test_worked_example(self):
        out = multiple_drop_perm(Permutation([6, 3, 1, 7, 2, 5, 4]), (2, 4))
        assert out.as_tuple() == (5, 1, 2, 4, 3)

    @given(perm_and_batch())
    @settings(max_examples=150)
    def test_single_fold_equals_drop(self, case):
        perm, positions = case
        m = positions[0]
        assert multiple_drop_perm(perm, (m,)) == drop_perm(perm, m)

    def test_invalid_positions_rejected(self):
        perm = Permutation([2, 1, 3])
        with pytest.raises(ValidationError):
            multiple_drop_perm(perm, (1, 4))
        with pytest.raises(ValidationError):
            multiple_lift_perm(perm, ())
