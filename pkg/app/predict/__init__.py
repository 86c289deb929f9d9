from app.predict.decay import (
    DecayPrediction,
    DecayRegime,
    alpha_for_order,
    exponent_transform,
    predict,
    rate_table,
)


__all__ = [
    "DecayPrediction",
    "DecayRegime",
    "alpha_for_order",
    "exponent_transform",
    "predict",
    "rate_table",
]
