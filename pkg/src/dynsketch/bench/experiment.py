"""Experiment runner: update rules vs from-scratch re-sketching.

Three paths consume one shared workload:

* ``sequential``: the single-feature update rule applied once per feature.
* ``batch``: the batch update rule applied in one shot.
* ``scratch``: re-sketching the edited points. With ``scratch_perms="fresh"``
  (default) the permutations are regenerated at the new dimension, which is
  the baseline the speedup numbers are measured against; with ``"lineage"``
  the original permutations are lifted/dropped instead, in which case the
  scratch sketches must equal the update-rule sketches slot for slot.

Timing uses a monotonic clock, one discarded warm-up run, and the median of
the remaining repetitions. Corpus loading, vector editing, and RMSE
evaluation are excluded from the timed sections.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from time import perf_counter

import numpy as np

from dynsketch.core import ValidationError, delete_features, insert_features
from dynsketch.ingest import Corpus, load_docword, sample_corpus
from dynsketch.permgen import (
    PermutationSeed,
    multiple_drop_perm,
    multiple_lift_perm,
    random_permutation,
)
from dynsketch.bench import engine
from dynsketch.bench.synthetic import synthetic_corpus
from dynsketch.bench.workload import digest_batch, draw_deletion_plan, draw_insertion_plan

MODES = ("insert", "delete")
PATHS = ("sequential", "batch", "scratch")
SCRATCH_MODES = ("fresh", "lineage")

# Keeps the fresh-baseline permutation stream disjoint from the baseline one.
_SCRATCH_SEED_SALT = 0x9E3779B97F4A7C15
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    num_perms: int = 500
    n_features: tuple[int, ...] = (64,)
    insert_one_prob: float = 0.1
    master_seed: int = 0
    paths: tuple[str, ...] = PATHS
    scratch_perms: str = "fresh"
    repetitions: int = 5
    threads: int = 1
    data: str | None = None
    synthetic: tuple[int, int, int] | None = None  # dim, support size, points
    sample_size: int | None = None

    def validated(self) -> "ExperimentConfig":
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.num_perms < 1:
            raise ValidationError("num_perms must be at least 1")
        ns = tuple(sorted({int(n) for n in self.n_features}))
        if not ns or ns[0] < 1:
            raise ValidationError("n_features must contain positive batch sizes")
        if not 0.0 <= self.insert_one_prob <= 1.0:
            raise ValidationError("insert_one_prob must lie in [0, 1]")
        if self.master_seed < 0 or self.master_seed > _SEED_MASK:
            raise ValidationError("master_seed must fit in 64 bits")
        paths = tuple(dict.fromkeys(self.paths))
        if not paths or any(p not in PATHS for p in paths):
            raise ValidationError(f"paths must be a non-empty subset of {PATHS}")
        if self.scratch_perms not in SCRATCH_MODES:
            raise ValidationError(f"scratch_perms must be one of {SCRATCH_MODES}")
        if self.repetitions < 1:
            raise ValidationError("repetitions must be at least 1")
        if self.threads < 1:
            raise ValidationError("threads must be at least 1")
        if (self.data is None) == (self.synthetic is None):
            raise ValidationError("provide exactly one of data or synthetic")
        if self.synthetic is not None:
            d, k, pts = self.synthetic
            if d < 1 or pts < 1 or not 0 <= k <= d:
                raise ValidationError(
                    "synthetic corpus needs 0 <= support_size <= dim and points >= 1"
                )
        if self.sample_size is not None and self.sample_size < 1:
            raise ValidationError("sample_size must be at least 1")
        return replace(self, n_features=ns, paths=paths)

    def echo(self) -> dict:
        return {
            "mode": self.mode,
            "num_perms": self.num_perms,
            "n_features": ",".join(str(n) for n in self.n_features),
            "insert_one_prob": self.insert_one_prob,
            "master_seed": self.master_seed,
            "paths": ",".join(self.paths),
            "scratch_perms": self.scratch_perms,
            "repetitions": self.repetitions,
            "threads": self.threads,
            "data": self.data or "",
            "synthetic": ",".join(str(v) for v in self.synthetic) if self.synthetic else "",
            "sample_size": self.sample_size or "",
        }


@dataclass(frozen=True)
class PathResult:
    path: str
    n: int
    num_perms: int
    rmse: float
    seconds: float
    speedup: float | None
    rmse_post: float
    speedup_max: float | None
    speedup_mean: float | None
    sketch_digest: str
    times: tuple[float, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class ExperimentReport:
    mode: str
    config: dict
    workload_checksums: dict
    results: tuple[PathResult, ...]


def _load_corpus(cfg: ExperimentConfig) -> Corpus:
    if cfg.data is not None:
        corpus = load_docword(cfg.data)
    else:
        d, k, pts = cfg.synthetic
        corpus = synthetic_corpus(d, k, pts, cfg.master_seed)
    if cfg.sample_size is not None:
        corpus = sample_corpus(corpus, cfg.sample_size, cfg.master_seed)
    return corpus


def _fresh_scratch_seed(master_seed: int) -> int:
    return (master_seed ^ _SCRATCH_SEED_SALT) & _SEED_MASK


def _timed(fn, repetitions: int):
    fn()  # warm-up, discarded
    times = []
    result = None
    for _ in range(repetitions):
        start = perf_counter()
        result = fn()
        times.append(perf_counter() - start)
    return result, tuple(times)


def run_insertion_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.mode != "insert":
        raise ValidationError("config mode must be 'insert'")
    return _run(cfg)


def run_deletion_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.mode != "delete":
        raise ValidationError("config mode must be 'delete'")
    return _run(cfg)


def _run(cfg: ExperimentConfig) -> ExperimentReport:
    cfg = cfg.validated()
    corpus = _load_corpus(cfg)
    dim = corpus.vocab_size
    if dim < 1:
        raise ValidationError("corpus dimension must be positive")
    points = corpus.vectors
    pack = engine.pack_supports(points)
    perms = [
        random_permutation(dim, PermutationSeed(cfg.master_seed, i))
        for i in range(cfg.num_perms)
    ]
    base = engine.sketch_matrix(pack, perms, cfg.threads)
    truth, both_empty = engine.pairwise_true_jaccard(pack)
    include = ~both_empty

    max_n = max(cfg.n_features)
    if cfg.mode == "insert":
        plan = draw_insertion_plan(dim, max_n, cfg.insert_one_prob, cfg.master_seed)
    else:
        plan = draw_deletion_plan(dim, max_n, cfg.master_seed)

    results = []
    checksums = {}
    for n in cfg.n_features:
        wl = plan.workload(n)
        checksums[n] = wl.checksum
        batch = wl.batch
        if cfg.mode == "insert":
            edited = [insert_features(v, batch) for v in points]
            new_dim = dim + n
        else:
            edited = [delete_features(v, batch) for v in points]
            new_dim = dim - n
        epack = engine.pack_supports(edited)
        if new_dim > 0:
            post_truth, post_empty = engine.pairwise_true_jaccard(epack)
        else:
            post_truth, post_empty = truth * 0.0, np.ones_like(both_empty)
        include_post = ~post_empty

        runners = _path_runners(cfg, pack, epack, perms, base, batch, new_dim)
        finals = {}
        timings = {}
        for path in cfg.paths:
            # every path must consume the one drawn workload
            if digest_batch(cfg.mode, batch) != wl.checksum:
                raise AssertionError(f"workload drift on the {path} path")
            final, times = _timed(runners[path], cfg.repetitions)
            finals[path] = final
            timings[path] = times

        _assert_slot_identities(cfg, finals)

        scratch_times = timings.get("scratch")
        for path in (p for p in PATHS if p in cfg.paths):
            h = finals[path]
            est = engine.pairwise_estimates(h)
            row_rmse = engine.rmse_condensed(est, truth, include)
            row_rmse_post = engine.rmse_condensed(est, post_truth, include_post)
            times = timings[path]
            seconds = statistics.median(times)
            speedup = speedup_max = speedup_mean = None
            if scratch_times is not None:
                ratios = [s / t for s, t in zip(scratch_times, times)]
                speedup = statistics.median(scratch_times) / seconds
                speedup_max = max(ratios)
                speedup_mean = statistics.fmean(ratios)
            results.append(
                PathResult(
                    path=path,
                    n=n,
                    num_perms=cfg.num_perms,
                    rmse=row_rmse,
                    seconds=seconds,
                    speedup=speedup,
                    rmse_post=row_rmse_post,
                    speedup_max=speedup_max,
                    speedup_mean=speedup_mean,
                    sketch_digest=engine.sketch_digest(h),
                    times=times,
                )
            )

    return ExperimentReport(
        mode=cfg.mode,
        config=cfg.echo(),
        workload_checksums=checksums,
        results=tuple(results),
    )


def _path_runners(cfg, pack, epack, perms, base, batch, new_dim):
    runners = {}
    if cfg.mode == "insert":
        if "sequential" in cfg.paths:
            runners["sequential"] = lambda: engine.apply_sequential_insert(
                base, perms, batch
            )
        if "batch" in cfg.paths:
            runners["batch"] = lambda: engine.apply_batch_insert(base, perms, batch)
    else:
        if "sequential" in cfg.paths:
            runners["sequential"] = lambda: engine.apply_sequential_delete(
                base, pack, perms, batch
            )
        if "batch" in cfg.paths:
            runners["batch"] = lambda: engine.apply_batch_delete(
                base, pack, perms, batch
            )
    if "scratch" in cfg.paths:
        if cfg.scratch_perms == "fresh":
            scratch_seed = _fresh_scratch_seed(cfg.master_seed)

            def scratch():
                fresh = [
                    random_permutation(new_dim, PermutationSeed(scratch_seed, i))
                    for i in range(cfg.num_perms)
                ]
                return engine.sketch_matrix(epack, fresh, cfg.threads)

        else:
            lift = multiple_lift_perm if cfg.mode == "insert" else multiple_drop_perm

            def scratch():
                carried = [lift(p, batch.positions) for p in perms]
                return engine.sketch_matrix(epack, carried, cfg.threads)

        runners["scratch"] = scratch
    return runners


def _assert_slot_identities(cfg, finals):
    """The update rules are exact, so equal-lineage paths must agree."""
    lineage_paths = [p for p in ("sequential", "batch") if p in finals]
    if cfg.scratch_perms == "lineage" and "scratch" in finals:
        lineage_paths.append("scratch")
    for path in lineage_paths[1:]:
        if not np.array_equal(finals[path], finals[lineage_paths[0]]):
            raise AssertionError(
                f"{lineage_paths[0]} and {path} paths disagree; "
                "the update rules should be exact"
            )


_CSV_COLUMNS = (
    "path",
    "n",
    "K",
    "rmse",
    "seconds",
    "speedup",
    "rmse_post",
    "speedup_max",
    "speedup_mean",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def emit_report(report: ExperimentReport, format: str = "csv") -> str:
    """Render a report as CSV (stable column order) or a human summary."""
    if format not in ("csv", "human"):
        raise ValidationError("format must be 'csv' or 'human'")
    rows = [
        (
            r.path,
            r.n,
            r.num_perms,
            r.rmse,
            r.seconds,
            r.speedup,
            r.rmse_post,
            r.speedup_max,
            r.speedup_mean,
        )
        for r in report.results
    ]
    if format == "csv":
        lines = [",".join(_CSV_COLUMNS)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    lines = [f"experiment mode: {report.mode}"]
    for key, value in report.config.items():
        lines.append(f"  {key} = {value}")
    for n, checksum in report.workload_checksums.items():
        lines.append(f"  workload[n={n}] = {checksum}")
    widths = [max(len(c), 12) for c in _CSV_COLUMNS]
    header = "  ".join(c.ljust(w) for c, w in zip(_CSV_COLUMNS, widths))
    lines.append(header)
    lines.append("-" * len(header))
    for row in rows:
        lines.append(
            "  ".join(_fmt(v).ljust(w) for v, w in zip(row, widths))
        )
    return "\n".join(lines) + "\n"
