"""Two-stage loan scoring: a default-probability gate followed by IRR regression."""

from ._core import (
    DataError,
    LoanRecord,
    TrainError,
    TwoStageModel,
    UsageError,
    __version__,
    compare_approaches,
    gen_synthetic,
    load_dataset,
    run_cli,
    solve_irr,
    split_train_test,
    summarize,
    write_loans_csv,
    write_payments_csv,
)

__all__ = [
    "DataError",
    "LoanRecord",
    "TrainError",
    "TwoStageModel",
    "UsageError",
    "__version__",
    "compare_approaches",
    "gen_synthetic",
    "load_dataset",
    "run_cli",
    "solve_irr",
    "split_train_test",
    "summarize",
    "write_loans_csv",
    "write_payments_csv",
]
