"""Dense matrices over GF(q) with row/column partitioning and reassembly.

Matrices are immutable by convention: no method mutates storage, every
operation returns a fresh instance. Entries live in an int64 ndarray when
q <= 2^31 (all intermediate products then fit in 63 bits) and fall back to
an exact object array of Python ints for larger moduli.
"""

from __future__ import annotations

import random

import numpy as np

from .field import FieldElement, FieldModulus, sample_uniform

# Largest modulus for which a*b with a,b < q fits in a signed 64-bit int.
_INT64_Q_LIMIT = 2**31


def _dtype_for(q: int):
    return np.int64 if q <= _INT64_Q_LIMIT else object


def _matmul_reduced(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Exact (a @ b) mod q for already-reduced inputs."""
    if a.dtype == object:
        return (a @ b) % q
    k = a.shape[1]
    if k == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if k * (q - 1) * (q - 1) < 2**63:
        return (a @ b) % q
    # Split a into 15+16 bit halves so both partial products accumulate
    # without overflowing int64 (entries < 2^31, so hi < 2^15).
    if k > 65535:
        raise ValueError("inner dimension too large for the int64 kernel")
    hi = a >> 16
    lo = a & 0xFFFF
    return (((hi @ b) % q << 16) + (lo @ b) % q) % q


class BlockMatrix:
    """Matrix over GF(q); all entries share one modulus."""

    __slots__ = ("modulus", "_data")

    def __init__(self, data: np.ndarray, modulus: FieldModulus):
        if data.ndim != 2:
            raise ValueError("BlockMatrix requires a 2-D array")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "_data", data)

    def __setattr__(self, name, value):
        raise AttributeError("BlockMatrix is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows, modulus: FieldModulus) -> "BlockMatrix":
        """Build from nested lists of ints or FieldElements (row-major)."""
        values = [[int(v) % modulus.q for v in row] for row in rows]
        widths = {len(r) for r in values}
        if len(widths) > 1:
            raise ValueError("ragged rows")
        arr = np.array(values, dtype=_dtype_for(modulus.q))
        if arr.ndim != 2:
            arr = arr.reshape(len(values), len(values[0]) if values else 0)
        return cls(arr, modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: FieldModulus) -> "BlockMatrix":
        arr = np.zeros((rows, cols), dtype=_dtype_for(modulus.q))
        if arr.dtype == object:
            arr[:] = 0
        return cls(arr, modulus)

    @classmethod
    def identity(cls, size: int, modulus: FieldModulus) -> "BlockMatrix":
        arr = np.zeros((size, size), dtype=_dtype_for(modulus.q))
        if arr.dtype == object:
            arr[:] = 0
        one = 1 % modulus.q
        for i in range(size):
            arr[i, i] = one
        return cls(arr, modulus)

    @classmethod
    def random(cls, rows: int, cols: int, modulus: FieldModulus, rng: random.Random) -> "BlockMatrix":
        """Uniform entries, drawn row-major from rng."""
        flat = [sample_uniform(modulus, rng).value for _ in range(rows * cols)]
        arr = np.array(flat, dtype=_dtype_for(modulus.q)).reshape(rows, cols)
        return cls(arr, modulus)

    # -- views -------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def entries(self) -> list[FieldElement]:
        """Row-major entries as field elements."""
        return [FieldElement(int(v), self.modulus) for v in self._data.ravel()]

    def as_array(self) -> np.ndarray:
        """Reduced residues as an ndarray. Treat as read-only."""
        return self._data

    def __getitem__(self, idx) -> FieldElement:
        i, j = idx
        return FieldElement(int(self._data[i, j]), self.modulus)

    def __eq__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return (
            self.modulus.q == other.modulus.q
            and self._data.shape == other._data.shape
            and bool(np.array_equal(self._data, other._data))
        )

    def __hash__(self):
        return hash((self.modulus.q, self._data.shape, tuple(int(v) for v in self._data.ravel())))

    def __repr__(self):
        return f"BlockMatrix({self.rows}x{self.cols} over GF({self.modulus.q}))"

    def _check_same_field(self, other: "BlockMatrix"):
        if self.modulus.q != other.modulus.q:
            raise ValueError(
                f"matrices over different fields: GF({self.modulus.q}) vs GF({other.modulus.q})"
            )

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check_same_field(other)
        if self._data.shape != other._data.shape:
            raise ValueError(f"shape mismatch: {self._data.shape} + {other._data.shape}")
        return BlockMatrix((self._data + other._data) % self.modulus.q, self.modulus)

    def __sub__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check_same_field(other)
        if self._data.shape != other._data.shape:
            raise ValueError(f"shape mismatch: {self._data.shape} - {other._data.shape}")
        return BlockMatrix((self._data - other._data) % self.modulus.q, self.modulus)

    def scale(self, scalar) -> "BlockMatrix":
        """Scalar multiple; scalar is an int or FieldElement of this field."""
        if isinstance(scalar, FieldElement):
            if scalar.modulus.q != self.modulus.q:
                raise ValueError("scalar from a different field")
            c = scalar.value
        else:
            c = int(scalar) % self.modulus.q
        return BlockMatrix(self._data * c % self.modulus.q, self.modulus)

    def __matmul__(self, other: "BlockMatrix") -> "BlockMatrix":
        return matmul(self, other)

    # -- partitioning --------------------------------------------------------

    def partition_rows(self, m: int) -> list["BlockMatrix"]:
        """m equal horizontal bands; band i holds rows [i*rows/m, (i+1)*rows/m)."""
        if m < 1 or self.rows % m != 0:
            raise ValueError(f"{m} does not divide row count {self.rows}")
        h = self.rows // m
        return [BlockMatrix(self._data[i * h:(i + 1) * h, :].copy(), self.modulus) for i in range(m)]

    def partition_cols(self, n: int) -> list["BlockMatrix"]:
        """n equal vertical bands, mirroring partition_rows."""
        if n < 1 or self.cols % n != 0:
            raise ValueError(f"{n} does not divide column count {self.cols}")
        w = self.cols // n
        return [BlockMatrix(self._data[:, j * w:(j + 1) * w].copy(), self.modulus) for j in range(n)]

    def to_json_dict(self) -> dict:
        """Matrix literal: {rows, cols, q, entries} with row-major integers."""
        return {
            "rows": self.rows,
            "cols": self.cols,
            "q": self.modulus.q,
            "entries": [int(v) for v in self._data.ravel()],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "BlockMatrix":
        modulus = FieldModulus(obj["q"])
        rows, cols = obj["rows"], obj["cols"]
        entries = obj["entries"]
        if len(entries) != rows * cols:
            raise ValueError("entries length does not match rows*cols")
        arr = np.array([int(v) % modulus.q for v in entries], dtype=_dtype_for(modulus.q))
        return cls(arr.reshape(rows, cols), modulus)


def matmul(a: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    """Exact product over GF(q)."""
    a._check_same_field(b)
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    return BlockMatrix(_matmul_reduced(a.as_array(), b.as_array(), a.modulus.q), a.modulus)


def assemble_grid(blocks) -> BlockMatrix:
    """Inverse of the block view: block (a, b) lands in row-band a, column-band b.

    `blocks` is a non-empty list of lists of BlockMatrix with consistent
    band dimensions.
    """
    if not blocks or not blocks[0]:
        raise ValueError("empty grid")
    modulus = blocks[0][0].modulus
    width = len(blocks[0])
    for row in blocks:
        if len(row) != width:
            raise ValueError("ragged grid")
        for blk in row:
            if blk.modulus.q != modulus.q:
                raise ValueError("grid mixes fields")
            if blk.rows != row[0].rows:
                raise ValueError("inconsistent block heights within a band")
    for col in range(width):
        if any(row[col].cols != blocks[0][col].cols for row in blocks):
            raise ValueError("inconsistent block widths within a band")
    data = np.block([[blk.as_array() for blk in row] for row in blocks])
    return BlockMatrix(data, modulus)
