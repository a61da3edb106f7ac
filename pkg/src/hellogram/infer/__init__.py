"""
Inference: score featurized ClientHellos against every model.
"""

from hellogram.infer.instrument import CellReadCounter, count_cell_reads
from hellogram.infer.predictor import (
    Prediction,
    PredictionFailure,
    mean_log_likelihood,
    predict,
    predict_batch,
)

__all__ = [
    "CellReadCounter",
    "count_cell_reads",
    "Prediction",
    "PredictionFailure",
    "mean_log_likelihood",
    "predict",
    "predict_batch",
]
