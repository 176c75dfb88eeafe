from ._gridtree import (
    Error,
    Partitioned,
    PlainTree,
    Relation,
    RunResult,
    audit,
    classify,
    id3,
    load_relation,
    parse_relation,
    partition,
    predict,
    run,
    split_tuple,
    sweep,
    synthetic_relation,
    verify,
)

STRATEGIES = ("horizontal", "grid-hmerge", "grid-vmerge")

__all__ = [
    "Error",
    "Partitioned",
    "PlainTree",
    "Relation",
    "RunResult",
    "STRATEGIES",
    "audit",
    "classify",
    "id3",
    "load_relation",
    "parse_relation",
    "partition",
    "predict",
    "run",
    "split_tuple",
    "sweep",
    "synthetic_relation",
    "verify",
]
