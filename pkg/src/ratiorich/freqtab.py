"""Frequency-count tables and the ratio series derived from them.

A frequency-count table records, for each frequency ``j >= 1``, the number of
classes (species, taxa, word types, ...) observed exactly ``j`` times in a
sample.  Frequencies with a zero count are omitted and represent gaps.  All
estimation in this package consumes the series of consecutive-count ratios
``f_{j+1} / f_j`` taken over the contiguous block of frequencies starting
at ``j = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StructureError, TableParseError

__all__ = [
    "FrequencyTable",
    "TableStats",
    "RatioSeries",
    "StructureReport",
    "parse_frequency_table",
    "serialize_frequency_table",
    "derived_stats",
    "ratio_series",
    "check_structure",
]

# Minimum number of contiguous ratios required before estimation is attempted:
# the base two-parameter model needs a residual degree of freedom.
DEFAULT_MIN_RATIOS = 3


@dataclass(frozen=True)
class FrequencyTable:
    """Observed counts ``f_j`` indexed by frequency ``j``.

    ``indices`` are strictly increasing and >= 1; ``counts`` are >= 1.
    Frequencies that were never observed are simply absent.
    """

    indices: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.counts):
            raise ValueError("indices and counts must have equal length")
        prev = 0
        for j, f in zip(self.indices, self.counts):
            if j < 1:
                raise ValueError(f"frequency index must be >= 1, got {j}")
            if j <= prev:
                raise ValueError("frequency indices must be strictly increasing")
            if f < 1:
                raise ValueError(f"count for frequency {j} must be >= 1, got {f}")
            prev = j

    @classmethod
    def from_entries(cls, entries) -> "FrequencyTable":
        """Build a table from any ``{j: f_j}`` mapping or iterable of pairs."""
        pairs = sorted(dict(entries).items())
        return cls(tuple(j for j, _ in pairs), tuple(f for _, f in pairs))

    def count(self, j: int) -> int:
        """Count at frequency ``j``, or 0 if that frequency is a gap."""
        return dict(zip(self.indices, self.counts)).get(j, 0)

    def entries(self) -> dict[int, int]:
        return dict(zip(self.indices, self.counts))

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class TableStats:
    """Summary totals of a frequency table.

    ``c``: observed classes.  ``n``: observed individuals.  ``tau_max``: the
    largest frequency before the first gap.  ``num_ratios``: usable
    consecutive ratios (= ``tau_max - 1``).
    """

    c: int
    n: int
    tau_max: int
    num_ratios: int


@dataclass(frozen=True)
class RatioSeries:
    """Points ``(j, f_{j+1}/f_j)`` for ``j = 1..num_ratios`` plus the index mean."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    jbar: float

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.indices, self.values))


@dataclass(frozen=True)
class StructureReport:
    """Outcome of the pre-estimation structure check."""

    ok: bool
    reason: str | None
    num_ratios: int


def _parse_row(line: str) -> list[str]:
    if "," in line:
        return [field.strip() for field in line.split(",")]
    return line.split()


def parse_frequency_table(text: str) -> FrequencyTable:
    """Parse delimited text (comma or whitespace) into a :class:`FrequencyTable`.

    Each data row holds a frequency index and its count.  A single leading
    header line is skipped when its fields are not numeric.  Rows with a zero
    count are dropped (they mark gaps); rows need not be sorted.

    Raises:
        TableParseError: on non-integer fields, duplicate indices, an index
            below 1, or a negative count; the message names the line.
    """
    rows: dict[int, int] = {}
    lines = text.splitlines()
    first_data_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = _parse_row(line)
        if not first_data_seen:
            # Header auto-detection: a first line with non-numeric fields.
            first_data_seen = True
            try:
                int(fields[0])
            except ValueError:
                continue
        if len(fields) != 2:
            raise TableParseError(lineno, f"expected two columns, got {len(fields)}")
        try:
            j = int(fields[0])
            f = int(fields[1])
        except ValueError:
            raise TableParseError(lineno, f"non-integer field in {fields!r}") from None
        if j < 1:
            raise TableParseError(lineno, f"frequency index must be >= 1, got {j}")
        if f < 0:
            raise TableParseError(lineno, f"count must be >= 0, got {f}")
        if j in rows:
            raise TableParseError(lineno, f"duplicate frequency index {j}")
        rows[j] = f
    kept = {j: f for j, f in rows.items() if f > 0}
    if not kept:
        raise TableParseError(len(lines) or 1, "no data rows with a positive count")
    return FrequencyTable.from_entries(kept)


def serialize_frequency_table(table: FrequencyTable, delimiter: str = ",") -> str:
    """Render a table in the same two-column text format accepted by the parser."""
    return "\n".join(f"{j}{delimiter}{f}" for j, f in zip(table.indices, table.counts)) + "\n"


def derived_stats(table: FrequencyTable) -> TableStats:
    """Totals ``c``, ``n`` and the contiguous-prefix bounds of ``table``.

    Raises:
        StructureError: if the table is empty or the singleton count is missing.
    """
    if len(table) == 0:
        raise StructureError("empty frequency table")
    present = set(table.indices)
    if 1 not in present:
        raise StructureError("no singleton count: frequency 1 is required")
    c = sum(table.counts)
    n = sum(j * f for j, f in zip(table.indices, table.counts))
    tau_max = 1
    while tau_max + 1 in present:
        tau_max += 1
    return TableStats(c=c, n=n, tau_max=tau_max, num_ratios=tau_max - 1)


def ratio_series(table: FrequencyTable) -> RatioSeries:
    """Consecutive-count ratios over the contiguous prefix of ``table``.

    Counts beyond the first gap contribute to ``c`` and ``n`` but never to the
    series.

    Raises:
        StructureError: if no ratio can be formed (``tau_max == 1``).
    """
    stats = derived_stats(table)
    if stats.num_ratios < 1:
        raise StructureError("no ratios available: table has no contiguous pair f_1, f_2")
    entries = table.entries()
    indices = tuple(range(1, stats.num_ratios + 1))
    values = tuple(entries[j + 1] / entries[j] for j in indices)
    jbar = sum(indices) / len(indices)
    return RatioSeries(indices=indices, values=values, jbar=jbar)


def check_structure(table: FrequencyTable, min_ratios: int = DEFAULT_MIN_RATIOS) -> StructureReport:
    """Report whether ``table`` supports ratio regression.

    Never raises; the failing condition is spelled out in ``reason``.
    """
    if len(table) == 0:
        return StructureReport(ok=False, reason="empty frequency table", num_ratios=0)
    if 1 not in table.indices:
        return StructureReport(ok=False, reason="no singleton count (frequency 1 missing)", num_ratios=0)
    stats = derived_stats(table)
    if stats.num_ratios == 0:
        return StructureReport(ok=False, reason="no ratios: no contiguous pair f_1, f_2", num_ratios=0)
    if stats.num_ratios < min_ratios:
        return StructureReport(
            ok=False,
            reason=(
                f"too few contiguous ratios: {stats.num_ratios} available, "
                f"{min_ratios} required"
            ),
            num_ratios=stats.num_ratios,
        )
    return StructureReport(ok=True, reason=None, num_ratios=stats.num_ratios)
