"""Labeled samples, pooled sample sets, and the CSV interchange format.

The on-disk format has columns ``x_1,...,x_D,y,origin`` with origin ``P``
(source) or ``Q`` (target).  Lines starting with ``#`` are comments; the
generators use one to record their full configuration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SOURCE",
    "TARGET",
    "LabeledSample",
    "SampleSet",
    "DataFormatError",
    "read_samples_csv",
    "write_samples_csv",
]

SOURCE = "P"
TARGET = "Q"


class DataFormatError(ValueError):
    """Malformed data file; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class LabeledSample:
    """A covariate vector with its response and domain tag."""

    x: np.ndarray
    y: float
    origin: str = TARGET

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.origin not in (SOURCE, TARGET):
            raise ValueError(f"origin must be {SOURCE!r} or {TARGET!r}, got {self.origin!r}")
        if not np.all(np.isfinite(self.x)) or not np.isfinite(self.y):
            raise ValueError("sample coordinates and response must be finite")


@dataclass(frozen=True)
class SampleSet:
    """Pooled source+target samples as contiguous arrays.

    Attributes
    ----------
    x : np.ndarray, shape (n, D)
    y : np.ndarray, shape (n,)
    origin : np.ndarray, shape (n,), unicode, entries 'P' or 'Q'
    """

    x: np.ndarray
    y: np.ndarray
    origin: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        origin = np.asarray(self.origin, dtype="U1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "origin", origin)
        if x.ndim != 2:
            raise ValueError(f"x must be 2-d, got shape {x.shape}")
        n = x.shape[0]
        if y.shape != (n,) or origin.shape != (n,):
            raise ValueError("x, y, origin must agree on the number of rows")
        if n < 1:
            raise ValueError("a SampleSet needs at least one sample")
        if not np.all((origin == SOURCE) | (origin == TARGET)):
            raise ValueError("origin entries must be 'P' or 'Q'")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("covariates and responses must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def n_p(self) -> int:
        return int(np.count_nonzero(self.origin == SOURCE))

    @property
    def n_q(self) -> int:
        return int(np.count_nonzero(self.origin == TARGET))

    @property
    def ambient_dim(self) -> int:
        return self.x.shape[1]

    @classmethod
    def from_samples(cls, samples: Sequence[LabeledSample]) -> "SampleSet":
        if not samples:
            raise ValueError("need at least one sample")
        x = np.vstack([s.x for s in samples])
        y = np.array([s.y for s in samples])
        origin = np.array([s.origin for s in samples], dtype="U1")
        return cls(x=x, y=y, origin=origin)

    def target_only(self) -> "SampleSet":
        """Subset containing only target rows."""
        mask = self.origin == TARGET
        if not mask.any():
            raise ValueError("sample set contains no target rows")
        return SampleSet(x=self.x[mask], y=self.y[mask], origin=self.origin[mask])

    def target_x(self) -> np.ndarray:
        """Covariates of the target rows."""
        return self.x[self.origin == TARGET]


def read_samples_csv(path) -> SampleSet:
    """Parse a sample CSV, validating every row.

    Raises
    ------
    DataFormatError
        On a missing/invalid header or any malformed row, naming the line.
    """
    xs: list[list[float]] = []
    ys: list[float] = []
    origins: list[str] = []
    dim: int | None = None
    with open(path, newline="") as fh:
        header: list[str] | None = None
        for lineno, raw in enumerate(fh, start=1):
            if raw.startswith("#") or not raw.strip():
                continue
            row = next(csv.reader([raw]))
            if header is None:
                header = [c.strip() for c in row]
                dim = len(header) - 2
                expected = [f"x_{j + 1}" for j in range(dim)] + ["y", "origin"]
                if dim < 1 or header != expected:
                    raise DataFormatError(
                        f"expected header x_1,...,x_D,y,origin, got {','.join(header)}",
                        line=lineno,
                    )
                continue
            if len(row) != dim + 2:
                raise DataFormatError(f"expected {dim + 2} fields, got {len(row)}", line=lineno)
            try:
                xs.append([float(v) for v in row[:dim]])
                ys.append(float(row[dim]))
            except ValueError:
                raise DataFormatError(f"non-numeric value in {raw.strip()!r}", line=lineno) from None
            tag = row[dim + 1].strip()
            if tag not in (SOURCE, TARGET):
                raise DataFormatError(f"origin must be P or Q, got {tag!r}", line=lineno)
            origins.append(tag)
    if header is None:
        raise DataFormatError("empty file: no header found")
    if not xs:
        raise DataFormatError("no data rows found")
    return SampleSet(x=np.array(xs), y=np.array(ys), origin=np.array(origins, dtype="U1"))


def write_samples_csv(path, data: SampleSet, comments: Iterable[str] = ()) -> None:
    """Write a sample set; ``comments`` become leading ``#`` lines."""
    with open(path, "w", newline="") as fh:
        for comment in comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow([f"x_{j + 1}" for j in range(data.ambient_dim)] + ["y", "origin"])
        for i in range(data.n):
            writer.writerow(
                [repr(float(v)) for v in data.x[i]] + [repr(float(data.y[i])), str(data.origin[i])]
            )
