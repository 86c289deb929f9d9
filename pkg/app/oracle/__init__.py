from app.oracle.distance import ModelCurve, exact_distance, sandwich_check, swapped_distance


__all__ = ["ModelCurve", "exact_distance", "sandwich_check", "swapped_distance"]
