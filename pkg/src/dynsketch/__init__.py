"""MinHash sketches over sparse binary vectors with in-place updates under
feature insertions and deletions."""

from dynsketch.core import (
    EMPTY,
    DeletionBatch,
    HashValue,
    InsertionBatch,
    Permutation,
    Sketch,
    SparseBinaryVector,
    ValidationError,
    delete_features,
    insert_features,
)
from dynsketch.estimate import (
    PairEstimate,
    UniformityResult,
    jaccard_estimate,
    jaccard_true,
    minwise_uniformity_test,
    rmse,
)
from dynsketch.ingest import Corpus, ParseError, load_docword, parse_docword, sample_corpus, write_docword
from dynsketch.permgen import (
    PermutationSeed,
    drop_perm,
    lift_perm,
    multiple_drop_perm,
    multiple_lift_perm,
    random_permutation,
)
from dynsketch.sketch import (
    build_sketch,
    drop_hash,
    lift_hash,
    min_hash,
    multiple_drop_hash,
    multiple_lift_hash,
    partial_min_hash,
    update_sketch_delete,
    update_sketch_insert,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "Corpus",
    "DeletionBatch",
    "HashValue",
    "InsertionBatch",
    "PairEstimate",
    "ParseError",
    "Permutation",
    "PermutationSeed",
    "Sketch",
    "SparseBinaryVector",
    "UniformityResult",
    "ValidationError",
    "build_sketch",
    "delete_features",
    "drop_hash",
    "drop_perm",
    "insert_features",
    "jaccard_estimate",
    "jaccard_true",
    "lift_hash",
    "lift_perm",
    "load_docword",
    "min_hash",
    "minwise_uniformity_test",
    "multiple_drop_hash",
    "multiple_drop_perm",
    "multiple_lift_hash",
    "multiple_lift_perm",
    "parse_docword",
    "partial_min_hash",
    "random_permutation",
    "rmse",
    "sample_corpus",
    "update_sketch_delete",
    "update_sketch_insert",
    "write_docword",
]
