"""
Streaming reader and writer for the LIBSVM / svmlight text format.

    line  := label (SP index ":" value)* EOL
    index := positive integer, strictly increasing within a line

Blank lines are ignored and "#" starts a comment running to end of line.
Rows are accumulated straight into CSR buffers (data, indices, indptr), so
memory grows with the number of stored entries, not with the text size.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Optional

import numpy as np
import scipy.sparse as sp

from src.config.logging import get_logger
from src.errors import ParseError

logger = get_logger(__name__)

PROGRESS_EVERY = 100_000


@dataclass(frozen=True)
class LibsvmRecord:
    label: float
    entries: tuple[tuple[int, float], ...]


def _parse_float(token: str, what: str, line_no: int) -> float:
    try:
        if "_" in token:
            raise ValueError(token)
        value = float(token)
    except ValueError:
        raise ParseError(f"malformed {what} {token!r}", line_no) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {what} {token!r}", line_no)
    return value


def parse_line(line: str, line_no: int) -> Optional[LibsvmRecord]:
    """Parse one line; returns None for blank or comment-only lines."""
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    tokens = body.split()
    label = _parse_float(tokens[0], "label", line_no)
    entries = []
    previous = 0
    for token in tokens[1:]:
        index_text, sep, value_text = token.partition(":")
        if not sep:
            raise ParseError(f"malformed token {token!r} (expected index:value)", line_no)
        try:
            if "_" in index_text:
                raise ValueError(index_text)
            index = int(index_text)
        except ValueError:
            raise ParseError(f"malformed index {index_text!r}", line_no) from None
        if index <= 0:
            raise ParseError(f"index must be a positive integer, got {index}", line_no)
        if index <= previous:
            raise ParseError(f"indices must be strictly increasing ({index} after {previous})", line_no)
        previous = index
        entries.append((index, _parse_float(value_text, "value", line_no)))
    return LibsvmRecord(label=label, entries=tuple(entries))


def iter_records(stream: Iterable[str]) -> Iterator[LibsvmRecord]:
    for line_no, line in enumerate(stream, start=1):
        record = parse_line(line, line_no)
        if record is not None:
            yield record


def parse_libsvm(stream: Iterable[str], n_features: Optional[int] = None) -> tuple[sp.csr_matrix, np.ndarray]:
    """
    Read a LIBSVM text stream into (X as CSR, y).

    Column j holds feature index j + 1. The number of columns is the largest
    index seen, or `n_features` when that is larger. Explicit zeros are dropped.
    """
    data = array("d")
    indices = array("q")
    indptr = array("q", [0])
    labels = array("d")
    max_index = 0

    for row, record in enumerate(iter_records(stream), start=1):
        labels.append(record.label)
        for index, value in record.entries:
            if value != 0.0:
                data.append(value)
                indices.append(index - 1)
        if record.entries:
            max_index = max(max_index, record.entries[-1][0])
        indptr.append(len(data))
        if row % PROGRESS_EVERY == 0:
            logger.info("read %d rows (%d stored entries)", row, len(data))

    d = max(max_index, n_features or 0)
    n = len(labels)
    X = sp.csr_matrix(
        (np.frombuffer(data, dtype=np.float64),
         np.frombuffer(indices, dtype=np.int64),
         np.frombuffer(indptr, dtype=np.int64)),
        shape=(n, d),
    )
    return X, np.frombuffer(labels, dtype=np.float64).copy()


def dump_libsvm(X, y, stream: IO[str]) -> None:
    """Write (X, y) in LIBSVM format using round-trip float formatting."""
    X = sp.csr_matrix(X, copy=True)
    X.sort_indices()
    y = np.asarray(y, dtype=np.float64)
    for i in range(X.shape[0]):
        start, end = X.indptr[i], X.indptr[i + 1]
        parts = [repr(float(y[i]))]
        for j, value in zip(X.indices[start:end], X.data[start:end]):
            if value != 0.0:
                parts.append(f"{int(j) + 1}:{float(value)!r}")
        stream.write(" ".join(parts) + "\n")
