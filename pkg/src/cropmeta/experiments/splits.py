"""Grouped cross-validation splits."""

from __future__ import annotations

import numpy as np

from cropmeta.datagen.dataset import SampleSet
from cropmeta.errors import ValidationError


def loocv_splits_by_year(data: SampleSet) -> list[tuple[np.ndarray, np.ndarray, int]]:
    """Leave-one-year-out folds: (train_indices, test_indices, year).

    One fold per distinct year, ordered by year; the test sets partition
    the dataset.
    """
    years = sorted(set(int(y) for y in data.year))
    if len(years) < 2:
        raise ValidationError(
            f"leave-one-year-out needs at least 2 distinct years, got {len(years)}")
    folds = []
    for year in years:
        test = np.flatnonzero(data.year == year)
        train = np.flatnonzero(data.year != year)
        folds.append((train, test, year))
    return folds
