"""Benchmark engine, workload drawing, experiment runner, and report output."""

import csv
import io
import math

import numpy as np
import pytest

from dynsketch.core import (
    DeletionBatch,
    InsertionBatch,
    SparseBinaryVector,
    ValidationError,
)
from dynsketch.estimate import jaccard_estimate, jaccard_true, rmse
from dynsketch.permgen import PermutationSeed, random_permutation
from dynsketch.sketch import (
    build_sketch,
    drop_hash,
    lift_hash,
    min_hash,
    update_sketch_delete,
    update_sketch_insert,
)
from dynsketch.bench import (
    ExperimentConfig,
    emit_report,
    run_deletion_experiment,
    run_insertion_experiment,
    synthetic_corpus,
)
from dynsketch.bench import engine
from dynsketch.bench.workload import draw_deletion_plan, draw_insertion_plan


def random_points(rng, count, dim):
    points = []
    for _ in range(count):
        size = int(rng.integers(0, dim + 1))
        support = tuple(sorted(int(s) for s in rng.choice(dim, size, replace=False) + 1))
        points.append(SparseBinaryVector(dim, support))
    return points


@pytest.fixture(scope="module")
def small_world():
    rng = np.random.default_rng(77)
    dim = 30
    points = random_points(rng, 12, dim)
    perms = [random_permutation(dim, PermutationSeed(31, j)) for j in range(5)]
    return dim, points, perms


class TestEngineMatchesContracts:
    def test_sketch_matrix_equals_build_sketch(self, small_world):
        _, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        for i, point in enumerate(points):
            assert engine.matrix_row_to_sketch(matrix, i) == build_sketch(point, perms)

    def test_threaded_sketch_matrix_agrees(self, small_world):
        _, points, perms = small_world
        pack = engine.pack_supports(points)
        assert np.array_equal(
            engine.sketch_matrix(pack, perms, threads=1),
            engine.sketch_matrix(pack, perms, threads=4),
        )

    def test_batch_insert_matches_per_slot_rule(self, small_world):
        dim, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        batch = InsertionBatch((3, 11, 18, 29), (1, 0, 0, 1))
        updated = engine.apply_batch_insert(matrix, perms, batch)
        for i, point in enumerate(points):
            expected = update_sketch_insert(
                engine.matrix_row_to_sketch(matrix, i), perms, batch
            )
            assert engine.matrix_row_to_sketch(updated, i) == expected

    def test_sequential_insert_matches_folded_lift_hash(self, small_world):
        dim, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        batch = InsertionBatch((5, 9, 22), (0, 1, 0))
        updated = engine.apply_sequential_insert(matrix, perms, batch)
        from dynsketch.permgen import lift_perm

        for i in range(len(points)):
            for j, perm in enumerate(perms):
                h = engine.matrix_row_to_sketch(matrix, i).values[j]
                current = perm
                for step, (m, b) in enumerate(zip(batch.positions, batch.bits)):
                    slot = m + step
                    h = lift_hash(h, current.value_at(slot), b)
                    current = lift_perm(current, slot)
                assert engine.matrix_row_to_sketch(updated, i).values[j] == h

    def test_batch_delete_matches_per_slot_rule(self, small_world):
        dim, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        batch = DeletionBatch((2, 7, 15, 28))
        updated = engine.apply_batch_delete(matrix, pack, perms, batch)
        for i, point in enumerate(points):
            expected = update_sketch_delete(
                engine.matrix_row_to_sketch(matrix, i), perms, point, batch
            )
            assert engine.matrix_row_to_sketch(updated, i) == expected

    def test_sequential_delete_matches_folded_drop_hash(self, small_world):
        dim, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        batch = DeletionBatch((4, 13, 26))
        updated = engine.apply_sequential_delete(matrix, pack, perms, batch)
        from dynsketch.core import delete_features
        from dynsketch.permgen import drop_perm

        for i, point in enumerate(points):
            for j, perm in enumerate(perms):
                h = engine.matrix_row_to_sketch(matrix, i).values[j]
                current_perm, current_vec = perm, point
                for step, m in enumerate(batch.positions):
                    slot = m - step
                    h = drop_hash(h, current_vec, current_perm, slot)
                    current_perm = drop_perm(current_perm, slot)
                    current_vec = delete_features(current_vec, DeletionBatch((slot,)))
                assert engine.matrix_row_to_sketch(updated, i).values[j] == h

    def test_pairwise_truth_matches_jaccard_true(self, small_world):
        _, points, _ = small_world
        pack = engine.pack_supports(points)
        truth, both_empty = engine.pairwise_true_jaccard(pack)
        k = 0
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                assert truth[k] == pytest.approx(jaccard_true(points[i], points[j]))
                assert both_empty[k] == (not points[i].support and not points[j].support)
                k += 1

    def test_pairwise_estimates_match_jaccard_estimate(self, small_world):
        _, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        est = engine.pairwise_estimates(matrix)
        k = 0
        for i in range(len(points)):
            ski = engine.matrix_row_to_sketch(matrix, i)
            for j in range(i + 1, len(points)):
                skj = engine.matrix_row_to_sketch(matrix, j)
                assert est[k] == pytest.approx(
                    jaccard_estimate(ski, skj).estimated_jaccard
                )
                k += 1

    def test_rmse_condensed_matches_rmse(self, small_world):
        _, points, perms = small_world
        pack = engine.pack_supports(points)
        matrix = engine.sketch_matrix(pack, perms)
        truth, both_empty = engine.pairwise_true_jaccard(pack)
        est = engine.pairwise_estimates(matrix)
        include = ~both_empty
        pairs = []
        k = 0
        for i in range(len(points)):
            ski = engine.matrix_row_to_sketch(matrix, i)
            for j in range(i + 1, len(points)):
                if include[k]:
                    pairs.append(jaccard_estimate(
                        ski, engine.matrix_row_to_sketch(matrix, j),
                        true_jaccard=jaccard_true(points[i], points[j]),
                    ))
                k += 1
        assert engine.rmse_condensed(est, truth, include) == pytest.approx(rmse(pairs))


class TestWorkloads:
    def test_insertion_plan_is_deterministic(self):
        a = draw_insertion_plan(50, 10, 0.3, seed=4)
        b = draw_insertion_plan(50, 10, 0.3, seed=4)
        assert a == b

    def test_prefix_nesting(self):
        plan = draw_insertion_plan(200, 32, 0.1, seed=9)
        small = plan.workload(8).batch
        big = plan.workload(32).batch
        pairs_small = set(zip(small.positions, small.bits))
        pairs_big = set(zip(big.positions, big.bits))
        assert pairs_small <= pairs_big

    def test_checksum_tracks_content(self):
        plan = draw_insertion_plan(50, 4, 0.5, seed=4)
        other = draw_insertion_plan(50, 4, 0.5, seed=5)
        assert plan.workload(4).checksum != other.workload(4).checksum
        assert plan.workload(4).checksum == plan.workload(4).checksum

    def test_deletion_plan_positions_distinct(self):
        plan = draw_deletion_plan(40, 40, seed=2)
        batch = plan.workload(40).batch
        assert len(set(batch.positions)) == 40

    def test_invalid_draws_rejected(self):
        with pytest.raises(ValidationError):
            draw_insertion_plan(10, 11, 0.1, seed=1)
        with pytest.raises(ValidationError):
            draw_insertion_plan(10, 2, 1.5, seed=1)


class TestSyntheticCorpus:
    def test_shape_and_determinism(self):
        a = synthetic_corpus(40, 6, 9, seed=3)
        b = synthetic_corpus(40, 6, 9, seed=3)
        assert a == b
        assert a.num_docs == 9
        assert all(len(v.support) == 6 and v.dim == 40 for v in a.vectors)

    def test_validation(self):
        with pytest.raises(ValidationError):
            synthetic_corpus(10, 11, 5, seed=1)
        with pytest.raises(ValidationError):
            synthetic_corpus(0, 0, 5, seed=1)


def tiny_config(mode, **overrides):
    base = dict(
        mode=mode,
        num_perms=12,
        n_features=(4,),
        insert_one_prob=0.25,
        master_seed=6,
        synthetic=(60, 9, 15),
        repetitions=2,
        scratch_perms="lineage",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestExperimentRunner:
    def test_insert_lineage_paths_are_slot_identical(self):
        report = run_insertion_experiment(tiny_config("insert"))
        digests = {r.path: r.sketch_digest for r in report.results}
        assert digests["sequential"] == digests["batch"] == digests["scratch"]
        rmses = {r.path: r.rmse for r in report.results}
        assert rmses["batch"] == rmses["scratch"] == rmses["sequential"]

    def test_delete_lineage_paths_are_slot_identical(self):
        report = run_deletion_experiment(tiny_config("delete"))
        digests = {r.path: r.sketch_digest for r in report.results}
        assert digests["sequential"] == digests["batch"] == digests["scratch"]

    def test_single_feature_batch_equals_sequential(self):
        report = run_insertion_experiment(
            tiny_config("insert", n_features=(1,), paths=("sequential", "batch"))
        )
        digests = {r.path: r.sketch_digest for r in report.results}
        assert digests["sequential"] == digests["batch"]

    def test_delete_down_to_one_dimension(self):
        config = tiny_config(
            "delete", synthetic=(10, 3, 8), n_features=(9,), num_perms=6
        )
        report = run_deletion_experiment(config)
        digests = {r.path: r.sketch_digest for r in report.results}
        assert digests["sequential"] == digests["batch"] == digests["scratch"]

    def test_one_workload_checksum_per_batch_size(self):
        report = run_insertion_experiment(tiny_config("insert", n_features=(2, 4)))
        assert set(report.workload_checksums) == {2, 4}

    def test_fresh_scratch_populates_speedups(self):
        report = run_insertion_experiment(
            tiny_config("insert", scratch_perms="fresh")
        )
        for row in report.results:
            assert row.speedup is not None
            assert row.speedup_max >= row.speedup_mean * 0.5
            assert len(row.times) == 2
        scratch = [r for r in report.results if r.path == "scratch"][0]
        assert scratch.speedup == pytest.approx(1.0)

    def test_sweep_produces_per_n_rows(self):
        report = run_insertion_experiment(
            tiny_config("insert", n_features=(2, 4), paths=("batch",))
        )
        assert [(r.path, r.n) for r in report.results] == [("batch", 2), ("batch", 4)]

    def test_mode_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            run_insertion_experiment(tiny_config("delete"))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            tiny_config("insert", paths=("warp",)).validated()
        with pytest.raises(ValidationError):
            tiny_config("insert", synthetic=None).validated()
        with pytest.raises(ValidationError):
            tiny_config("insert", repetitions=0).validated()
        with pytest.raises(ValidationError):
            tiny_config("insert", insert_one_prob=1.5).validated()


@pytest.fixture(scope="module")
def report():
    return run_insertion_experiment(tiny_config("insert", scratch_perms="fresh"))


class TestEmitReport:

    def test_csv_header_is_stable(self, report):
        text = emit_report(report, "csv")
        header = text.splitlines()[0]
        assert header == "path,n,K,rmse,seconds,speedup,rmse_post,speedup_max,speedup_mean"

    def test_csv_round_trips_through_reader(self, report):
        rows = list(csv.reader(io.StringIO(emit_report(report, "csv"))))
        assert len(rows) == 1 + len(report.results)
        for row in rows[1:]:
            assert row[0] in ("sequential", "batch", "scratch")
            assert not math.isnan(float(row[3]))
            assert float(row[4]) > 0

    def test_human_format_contains_the_same_numbers(self, report):
        human = emit_report(report, "human")
        for row in report.results:
            assert format(row.rmse, ".9g") in human
            assert format(row.seconds, ".9g") in human
        assert "workload[n=4]" in human

    def test_unknown_format_rejected(self, report):
        with pytest.raises(ValidationError):
            emit_report(report, "yaml")
