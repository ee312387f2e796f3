"""Arithmetic over GF(16) and small dense matrices with entries in GF(16).

Field elements are plain ints in range(16).  The field is GF(2)[x]/(x^4+x+1);
addition is XOR, multiplication is table-driven.  Matrices are immutable,
row-major, one byte per element.
"""

REDUCTION_POLY = 0x13  # x^4 + x + 1

ORDER = 16


class DimensionError(ValueError):
    """Matrix shapes do not admit the requested operation."""


def _clmul(a: int, b: int) -> int:
    # carry-less 4x4 multiply followed by reduction, used only to build tables
    acc = 0
    for i in range(4):
        if (b >> i) & 1:
            acc ^= a << i
    for i in range(7, 3, -1):
        if (acc >> i) & 1:
            acc ^= REDUCTION_POLY << (i - 4)
    return acc


def _build_tables():
    mul = [bytes(_clmul(a, b) for b in range(16)) for a in range(16)]
    inv = [0] * 16
    for a in range(1, 16):
        for b in range(1, 16):
            if mul[a][b] == 1:
                inv[a] = b
                break
    # 256-entry row maps so whole byte strings multiply via bytes.translate;
    # indexes >= 16 never occur in validated data, map them mod 16 anyway
    scale = [bytes(mul[a][v & 0xF] for v in range(256)) for a in range(16)]
    return mul, bytes(inv), scale


MUL_TABLE, INV_TABLE, _SCALE = _build_tables()


def gf16_add(a: int, b: int) -> int:
    if not (0 <= a < 16 and 0 <= b < 16):
        raise ValueError("field elements must be in range(16)")
    return a ^ b


def gf16_mul(a: int, b: int) -> int:
    if not (0 <= a < 16 and 0 <= b < 16):
        raise ValueError("field elements must be in range(16)")
    return MUL_TABLE[a][b]


def gf16_inv(a: int) -> int:
    if not 0 <= a < 16:
        raise ValueError("field elements must be in range(16)")
    if a == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse")
    return INV_TABLE[a]


class Matrix:
    """Immutable dense matrix over GF(16), row-major bytes storage."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: bytes):
        if rows <= 0 or cols <= 0:
            raise DimensionError(f"degenerate shape {rows}x{cols}")
        data = bytes(data)
        if len(data) != rows * cols:
            raise DimensionError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(data)}"
            )
        if any(v > 15 for v in data):
            raise ValueError("matrix entries must be in range(16)")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, bytes(rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        data = bytearray(n * n)
        for i in range(n):
            data[i * n + i] = 1
        return cls(n, n, bytes(data))

    @classmethod
    def from_rows(cls, rows_seq) -> "Matrix":
        rows_seq = [list(r) for r in rows_seq]
        if not rows_seq or any(len(r) != len(rows_seq[0]) for r in rows_seq):
            raise DimensionError("rows must be non-empty and of equal length")
        flat = bytes(v for r in rows_seq for v in r)
        return cls(len(rows_seq), len(rows_seq[0]), flat)

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def row(self, i: int) -> bytes:
        return self.data[i * self.cols : (i + 1) * self.cols]

    def __getitem__(self, idx) -> int:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(idx)
        return self.data[i * self.cols + j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def is_zero(self) -> bool:
        return not any(self.data)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


def _unchecked(rows: int, cols: int, data: bytes) -> Matrix:
    # internal constructor for results of closed field operations
    m = object.__new__(Matrix)
    object.__setattr__(m, "rows", rows)
    object.__setattr__(m, "cols", cols)
    object.__setattr__(m, "data", data)
    return m


def pack_nibbles(data: bytes) -> bytes:
    """Pack GF(16) bytes two-per-byte, first element in the high nibble."""
    if len(data) % 2:
        data = data + b"\0"
    return bytes((a << 4) | b for a, b in zip(data[0::2], data[1::2]))


def unpack_nibbles(packed: bytes, count: int) -> bytes:
    out = bytearray(2 * len(packed))
    out[0::2] = bytes(v >> 4 for v in packed)
    out[1::2] = bytes(v & 0xF for v in packed)
    if len(out) < count or any(out[count:]):
        raise ValueError("packed nibble string does not hold that many elements")
    return bytes(out[:count])


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    n = len(a.data)
    x = int.from_bytes(a.data, "little") ^ int.from_bytes(b.data, "little")
    return _unchecked(a.rows, a.cols, x.to_bytes(n, "little"))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise DimensionError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    q, c = a.cols, b.cols
    brows = [b.data[j * c : (j + 1) * c] for j in range(q)]
    out = bytearray(a.rows * c)
    adata = a.data
    for i in range(a.rows):
        acc = 0
        base = i * q
        for j in range(q):
            e = adata[base + j]
            if e:
                acc ^= int.from_bytes(brows[j].translate(_SCALE[e]), "little")
        out[i * c : (i + 1) * c] = acc.to_bytes(c, "little")
    return _unchecked(a.rows, c, bytes(out))


def scalar_mat_sum(alphas, mats) -> Matrix:
    """Return sum_j alphas[j] * mats[j] over GF(16).

    All matrices must share one shape; at least one term is required.
    """
    if len(alphas) != len(mats):
        raise DimensionError(f"{len(alphas)} scalars for {len(mats)} matrices")
    if not mats:
        raise DimensionError("empty linear combination")
    rows, cols = mats[0].shape
    acc = bytearray(rows * cols)
    for a, m in zip(alphas, mats):
        if m.shape != (rows, cols):
            raise DimensionError(f"shape mismatch {m.shape} vs {(rows, cols)}")
        if not 0 <= a < 16:
            raise ValueError("field elements must be in range(16)")
        tbl = _SCALE[a]
        data = m.data
        for i in range(rows):
            lo = i * cols
            hi = lo + cols
            cur = int.from_bytes(acc[lo:hi], "little")
            cur ^= int.from_bytes(data[lo:hi].translate(tbl), "little")
            acc[lo:hi] = cur.to_bytes(cols, "little")
    return _unchecked(rows, cols, bytes(acc))


def split_lr(m: Matrix, r: int) -> tuple:
    """Split columns into a left (cols-r)-block and a right r-block."""
    if not 0 < r < m.cols:
        raise DimensionError(f"split width {r} invalid for {m.cols} columns")
    lw = m.cols - r
    left = bytearray(m.rows * lw)
    right = bytearray(m.rows * r)
    for i in range(m.rows):
        row = m.row(i)
        left[i * lw : (i + 1) * lw] = row[:lw]
        right[i * r : (i + 1) * r] = row[lw:]
    return _unchecked(m.rows, lw, bytes(left)), _unchecked(m.rows, r, bytes(right))


def concat_cols(a: Matrix, b: Matrix) -> Matrix:
    if a.rows != b.rows:
        raise DimensionError(f"row counts differ: {a.shape} vs {b.shape}")
    out = bytearray()
    for i in range(a.rows):
        out += a.row(i)
        out += b.row(i)
    return _unchecked(a.rows, a.cols + b.cols, bytes(out))
