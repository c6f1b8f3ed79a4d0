"""Input coercion helpers for the estimator API."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .freqtab import FrequencyTable


def as_frequency_table(X) -> FrequencyTable:
    """Coerce estimator input into a :class:`FrequencyTable`.

    Accepts an existing table, a ``{frequency: count}`` mapping, or a
    two-column array-like of ``(frequency, count)`` rows with integral
    values.
    """
    if isinstance(X, FrequencyTable):
        return X
    if isinstance(X, Mapping):
        return FrequencyTable.from_entries({int(j): int(f) for j, f in X.items()})
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(
            "expected a FrequencyTable, a {frequency: count} mapping, or a "
            f"two-column (frequency, count) array; got shape {arr.shape}"
        )
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("frequencies and counts must be integers")
    return FrequencyTable.from_entries({int(j): int(f) for j, f in arr})
