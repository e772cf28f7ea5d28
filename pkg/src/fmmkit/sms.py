"""SMS sparse matrix text format.

The format is line oriented and 1-based:

    <rows> <cols> M
    <i> <j> <value>
    ...
    0 0 0

Omitted entries are zero.  Values are integers or ``p/q`` rationals; an
extended variant used only for isotropy files allows Gaussian values written
as ``a``, ``bi``, ``a+bi`` or ``a-bi``.  Writing is canonical: entries are
emitted in row-major order with reduced fractions, so read(write(m)) is the
identity on canonical input.
"""

from __future__ import annotations

import io

from .linalg import Matrix
from .rings import (
    QQ,
    QI,
    GaussianRational,
    format_scalar,
    parse_complex_scalar,
    parse_scalar,
)

__all__ = ["SmsMatrix", "read_sms", "write_sms", "reads_sms", "dumps_sms"]


class SmsMatrix:
    """Sparse triples with an explicit shape; values are exact scalars."""

    def __init__(self, nrows, ncols, entries=()):
        if nrows < 1 or ncols < 1:
            raise ValueError("SMS matrices must have positive dimensions")
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        for i, j, v in entries:
            self._put(i, j, v)

    def _put(self, i, j, v):
        if not (1 <= i <= self.nrows and 1 <= j <= self.ncols):
            raise ValueError(f"entry ({i},{j}) outside {self.nrows}x{self.ncols}")
        if (i, j) in self.entries:
            raise ValueError(f"duplicate entry at ({i},{j})")
        if v:
            self.entries[(i, j)] = v

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @classmethod
    def from_matrix(cls, m):
        sms = cls(m.nrows, m.ncols)
        zero = m.ring.zero
        for i in range(m.nrows):
            for j in range(m.ncols):
                x = m.rows[i][j]
                if x != zero:
                    sms.entries[(i + 1, j + 1)] = _as_scalar(x)
        return sms

    def to_matrix(self, ring=None):
        """Dense matrix over `ring` (default: Q, or Q(i) if any entry is complex)."""
        complex_entries = any(
            isinstance(v, GaussianRational) and not v.is_rational
            for v in self.entries.values()
        )
        if ring is None:
            ring = QI if complex_entries else QQ
        rows = [[ring.zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i - 1][j - 1] = ring.coerce(v)
        return Matrix(ring, rows, coerce=False)

    def __eq__(self, other):
        if not isinstance(other, SmsMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"SmsMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)})"


def _as_scalar(x):
    if isinstance(x, GaussianRational):
        return x if not x.is_rational else x.to_fraction()
    return QQ.coerce(x)


def _format_value(v):
    if isinstance(v, GaussianRational):
        return str(v)
    return format_scalar(v)


def read_sms(stream, allow_complex=False):
    """Parse SMS text from a stream (or any line iterable)."""
    lines = iter(stream)

    def next_content_line():
        for raw in lines:
            line = raw.strip()
            if line:
                return line
        return None

    header = next_content_line()
    if header is None:
        raise ValueError("empty SMS input")
    parts = header.split()
    if len(parts) != 3 or parts[2] != "M":
        raise ValueError(f"malformed SMS header {header!r}")
    try:
        nrows, ncols = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"malformed SMS header {header!r}") from None
    sms = SmsMatrix(nrows, ncols)
    while True:
        line = next_content_line()
        if line is None:
            raise ValueError("missing SMS terminator '0 0 0'")
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"malformed SMS entry {line!r}")
        if fields == ["0", "0", "0"]:
            break
        i, j = int(fields[0]), int(fields[1])
        if allow_complex:
            v = parse_complex_scalar(fields[2])
            if v.is_rational:
                v = v.to_fraction()
        else:
            v = parse_scalar(fields[2])
        sms._put(i, j, v)
    return sms


def write_sms(sms, stream):
    """Canonical emission: row-major entries, reduced values."""
    stream.write(f"{sms.nrows} {sms.ncols} M\n")
    for (i, j) in sorted(sms.entries):
        stream.write(f"{i} {j} {_format_value(sms.entries[(i, j)])}\n")
    stream.write("0 0 0\n")


def reads_sms(text, allow_complex=False):
    return read_sms(io.StringIO(text), allow_complex=allow_complex)


def dumps_sms(sms):
    buf = io.StringIO()
    write_sms(sms, buf)
    return buf.getvalue()
