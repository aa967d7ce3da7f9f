"""Price/error surfaces and their deterministic CSV serialization.

CSV output is byte-stable for identical inputs: metadata lines are sorted,
numbers use fixed 12-significant-digit scientific notation, line endings
are LF and the encoding is UTF-8.  The in-memory surface also carries a
creation timestamp, which deliberately stays out of the file so repeated
runs produce identical bytes.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field

import numpy as np


def _fmt(x: float) -> str:
    return f"{x:.11e}"


@dataclass
class PriceSurface:
    """Values over one axis (columns per method) or two axes (one value)."""

    axis_names: tuple
    axes: tuple
    value_names: tuple
    values: tuple
    metadata: dict = field(default_factory=dict)
    created_at: str = field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat()
    )

    def __post_init__(self):
        if len(self.axis_names) not in (1, 2) or len(self.axis_names) != len(self.axes):
            raise ValueError("surface needs one or two named axes")
        if len(self.value_names) != len(self.values) or not self.values:
            raise ValueError("surface needs at least one named value array")
        self.axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        self.values = tuple(np.asarray(v, dtype=float) for v in self.values)
        expected = tuple(len(a) for a in self.axes)
        for name, arr in zip(self.value_names, self.values):
            if arr.shape != expected:
                raise ValueError(
                    f"value {name!r} has shape {arr.shape}, axes imply {expected}"
                )
            if not np.isfinite(arr).all():
                raise ValueError(f"value {name!r} contains non-finite entries")

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for key in sorted(self.metadata):
                handle.write(f"# {key}: {self.metadata[key]}\n")
            header = ",".join(list(self.axis_names) + list(self.value_names))
            handle.write(header + "\n")
            if len(self.axes) == 1:
                for i, a in enumerate(self.axes[0]):
                    row = [_fmt(a)] + [_fmt(v[i]) for v in self.values]
                    handle.write(",".join(row) + "\n")
            else:
                for i, a in enumerate(self.axes[0]):
                    for j, b in enumerate(self.axes[1]):
                        row = [_fmt(a), _fmt(b)] + [_fmt(v[i, j]) for v in self.values]
                        handle.write(",".join(row) + "\n")

    @property
    def n_rows(self) -> int:
        rows = len(self.axes[0])
        if len(self.axes) == 2:
            rows *= len(self.axes[1])
        return rows
