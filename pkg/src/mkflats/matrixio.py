"""Plain-text matrix and label files.

Matrices hold one point per line as comma- or whitespace-separated reals;
blank lines and lines starting with '#' are ignored. Label files hold one
integer per line: clusters are numbered from 1 and 0 marks an outlier.
"""

import re

import numpy as np

from .exceptions import ParseError
from .synth import OUTLIER

_SEP = re.compile(r"[,\s]+")


def parse_row(line, lineno):
    fields = [f for f in _SEP.split(line.strip()) if f]
    try:
        return [float(f) for f in fields]
    except ValueError:
        bad = next(f for f in fields if not _is_float(f))
        raise ParseError(lineno, f"cannot read {bad!r} as a number") from None


def read_matrix(path):
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            row = parse_row(line, lineno)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(lineno, f"expected {width} values, got {len(row)}")
            rows.append(row)
    if not rows:
        raise ParseError(0, f"{path} contains no data rows")
    return np.array(rows, dtype=float)


def write_matrix(path, M, header=None):
    with open(path, "w") as fh:
        _write_rows(fh, M, header)


def write_bases(path, bases):
    """Write a (K, d, D) stack as K blocks of d rows, one '# flat i' comment per block."""
    bases = np.asarray(bases)
    K, d, D = bases.shape
    with open(path, "w") as fh:
        fh.write(f"# K={K} d={d} D={D}\n")
        for i, P in enumerate(bases, 1):
            _write_rows(fh, P, f"flat {i}")


def read_bases(path, K):
    M = read_matrix(path)
    return M.reshape(K, M.shape[0] // K, M.shape[1])


def write_labels(path, labels):
    """Write 0-based cluster labels as 1-based integers; OUTLIER becomes 0."""
    labels = np.asarray(labels)
    out = np.where(labels == OUTLIER, 0, labels + 1)
    with open(path, "w") as fh:
        fh.writelines(f"{v}\n" for v in out)


def read_labels(path):
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(int(text))
            except ValueError:
                raise ParseError(lineno, f"cannot read {text!r} as an integer label") from None
    values = np.array(values, dtype=int)
    return np.where(values == 0, OUTLIER, values - 1)


def _write_rows(fh, M, header):
    if header:
        fh.write(f"# {header}\n")
    for row in np.atleast_2d(M):
        fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True
