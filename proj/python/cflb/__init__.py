"""Correlation filters with limited boundaries: MOSSE, exact oracles, the ADMM solver and a tracker."""

from ._core import (
    AdmmResult,
    DegenerateInput,
    Error,
    IoError,
    NumericalError,
    TrackResult,
    __version__,
    anchored_response,
    cflb_admm_train,
    correlate,
    count_unaffected_shifts,
    dft2,
    idft2,
    localization_set,
    masked_objective,
    masked_spatial_oracle,
    mosse_train,
    preprocess,
    psr,
    run_tracker,
    spatial_ridge_oracle,
    tracking_sequence,
)

__all__ = [
    "AdmmResult",
    "DegenerateInput",
    "Error",
    "IoError",
    "NumericalError",
    "TrackResult",
    "__version__",
    "anchored_response",
    "cflb_admm_train",
    "correlate",
    "count_unaffected_shifts",
    "dft2",
    "idft2",
    "localization_set",
    "masked_objective",
    "masked_spatial_oracle",
    "mosse_train",
    "preprocess",
    "psr",
    "run_tracker",
    "spatial_ridge_oracle",
    "tracking_sequence",
]
