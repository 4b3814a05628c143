from ._pemda import (
    AlignmentError,
    BlowUpError,
    Error,
    Grid,
    IntegratorConfig,
    Interpolant,
    InterpolantKind,
    IoError,
    Params,
    RunRecord,
    SolvabilityError,
    State,
    Trajectory,
    ValidationError,
    compute_thresholds,
    empirical_k0,
    fit_decay_rate,
    random_state,
    read_records,
    run_cda,
    run_reference,
    sensitivity_study,
    state_from_arrays,
    summarize_cda,
    verify,
    write_records,
)
from ._pemda import main as _main


def cli(*args):
    """Run the command line in-process; returns (exit code, stdout, stderr)."""
    return _main([str(a) for a in args])


__all__ = [name for name in dir() if not name.startswith("_")]
