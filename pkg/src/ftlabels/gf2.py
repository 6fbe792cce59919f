"""Linear algebra over GF(2) with Python ints as bit-packed vectors.

A vector of length ``r`` is an int whose bit ``i`` is coordinate ``i``.  A
matrix is stored by columns, which is the natural shape for the connectivity
decoder: one column per faulty edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionMismatch


@dataclass(frozen=True)
class Gf2Matrix:
    rows: int
    cols: tuple[int, ...]

    def __post_init__(self):
        limit = 1 << self.rows
        for c in self.cols:
            if c < 0 or c >= limit:
                raise DimensionMismatch(f"column {c:#x} wider than {self.rows} rows")

    @classmethod
    def from_columns(cls, rows: int, cols: Iterable[int]) -> "Gf2Matrix":
        return cls(rows, tuple(cols))

    @classmethod
    def from_rows(cls, row_bits: Sequence[int], ncols: int) -> "Gf2Matrix":
        cols = [0] * ncols
        for i, r in enumerate(row_bits):
            for j in range(ncols):
                if r >> j & 1:
                    cols[j] |= 1 << i
        return cls(len(row_bits), tuple(cols))

    @property
    def ncols(self) -> int:
        return len(self.cols)

    def mul(self, x: int) -> int:
        """A·x where bit ``j`` of ``x`` selects column ``j``."""
        acc = 0
        j = 0
        while x:
            if x & 1:
                acc ^= self.cols[j]
            x >>= 1
            j += 1
        return acc


class _Basis:
    """Incremental echelon basis; each vector remembers which columns built it."""

    __slots__ = ("pivots",)

    def __init__(self):
        # pivot bit -> (vector, combination mask)
        self.pivots: dict[int, tuple[int, int]] = {}

    def reduce(self, v: int, combo: int) -> tuple[int, int]:
        while v:
            top = v.bit_length() - 1
            hit = self.pivots.get(top)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        return v, combo

    def add(self, v: int, combo: int) -> tuple[int, int]:
        """Insert a vector; returns the residue (0 means it was dependent)."""
        v, combo = self.reduce(v, combo)
        if v:
            self.pivots[v.bit_length() - 1] = (v, combo)
        return v, combo


def gf2_solve(a: Gf2Matrix, w: int, rows: int | None = None) -> int | None:
    """Some ``x`` with ``A·x = w`` over GF(2), or ``None`` if ``w`` is outside the span."""
    if rows is not None and rows != a.rows:
        raise DimensionMismatch(f"rhs has {rows} rows, matrix has {a.rows}")
    if w < 0 or w >> a.rows:
        raise DimensionMismatch("rhs wider than the matrix")
    basis = _Basis()
    for j, c in enumerate(a.cols):
        basis.add(c, 1 << j)
    rest, combo = basis.reduce(w, 0)
    if rest:
        return None
    assert a.mul(combo) == w
    return combo


def rank(cols: Iterable[int]) -> int:
    basis = _Basis()
    r = 0
    for c in cols:
        v, _ = basis.add(c, 0)
        if v:
            r += 1
    return r


def kernel_basis(cols: Sequence[int]) -> list[int]:
    """A basis of ``{x : A·x = 0}``, each vector a column-selection mask."""
    basis = _Basis()
    out = []
    for j, c in enumerate(cols):
        v, combo = basis.add(c, 1 << j)
        if not v:
            out.append(combo)
    return out


def parity(x: int) -> int:
    return x.bit_count() & 1
