"""Per-slot schedule traces and their CSV form."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CSV_HEADER = ("hyperperiod", "slot", "task_id")


@dataclass(frozen=True)
class ScheduleTrace:
    """``K x L`` matrix of slot symbols: a task id, or 0 for idle."""

    slots: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.slots)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"trace must be a non-empty K x L matrix, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("trace symbols must be integers")
        if (arr < 0).any():
            raise ValueError("trace symbols must be task ids >= 0")
        object.__setattr__(self, "slots", arr)

    @classmethod
    def from_flat(cls, flat, hyperperiod: int) -> "ScheduleTrace":
        flat = np.asarray(flat)
        if flat.size % hyperperiod:
            raise ValueError("flat trace length is not a multiple of the hyperperiod")
        return cls(flat.reshape(-1, hyperperiod))

    @property
    def K(self) -> int:
        return self.slots.shape[0]

    @property
    def L(self) -> int:
        return self.slots.shape[1]

    @property
    def flat(self) -> np.ndarray:
        return self.slots.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, ScheduleTrace):
            return NotImplemented
        return self.slots.shape == other.slots.shape and bool((self.slots == other.slots).all())

    __hash__ = None

    def to_csv(self, dest) -> None:
        """Write to a path or an open text stream."""
        if hasattr(dest, "write"):
            self._write_csv(dest)
        else:
            with open(dest, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for k, row in enumerate(self.slots.tolist()):
            w.writerows((k, s, sym) for s, sym in enumerate(row))

    @classmethod
    def from_csv(cls, path: str | Path) -> "ScheduleTrace":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
                raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
            rows = [tuple(int(x) for x in r) for r in reader if r]
        if not rows:
            raise ValueError(f"{path}: trace has no slots")
        data = np.array(rows, dtype=np.int64)
        K, L = int(data[:, 0].max()) + 1, int(data[:, 1].max()) + 1
        if len(data) != K * L:
            raise ValueError(f"{path}: expected {K * L} rows for a {K}x{L} trace, got {len(data)}")
        slots = np.full((K, L), -1, dtype=np.int64)
        slots[data[:, 0], data[:, 1]] = data[:, 2]
        if (slots < 0).any():
            raise ValueError(f"{path}: missing or negative slots")
        return cls(slots)
