"""Functional and cycle-cost model of the hardware accelerators.

Two blocks are modeled: a packed-column engine for the scalar-matrix sum
(one scalar-column product per cycle, P of them in parallel) and a Keccak
permutation core (one permutation per 24 cycles).  The engine model is
bit-exact: it computes the same GF(16) result as the software kernel, via
nibble-sliced arithmetic on 60-bit column words, alongside the cycle count.

Runtime predictions for a hardware/software cut combine a measured
software profile with these cycle models under an overlap rule: the
accelerator runs concurrently with the listed overlap stages and only its
excess beyond that window contributes to the predicted time.
"""

from dataclasses import dataclass

from .gf16 import DimensionError, Matrix, _unchecked
from .keccak import HASH_RATE, PRNG_RATE
from .mpcith import ParameterSet
from .profiler import STAGE_ORDER, SoftwareProfile

PACKED_ROWS = 15
WORD_BITS = 4 * PACKED_ROWS

DEFAULT_CLOCK_MHZ = 125.0
KECCAK_CYCLES_PER_PERMUTE = 24

# nibble-slice masks for 15 packed elements
_MASK_LOW3 = int("7" * PACKED_ROWS, 16)
_MASK_TOP = int("8" * PACKED_ROWS, 16)

KECCAK_STAGES = frozenset({"keccak_permute", "keccak_squeeze", "keccak_absorb"})
HW_STAGES = frozenset({"scalar_mat_sum"}) | KECCAK_STAGES


class ConfigError(ValueError):
    """A cut or accelerator description the model cannot evaluate."""


@dataclass(frozen=True)
class AccelConfig:
    parallelism: int = 1
    clock_mhz: float = DEFAULT_CLOCK_MHZ
    pipeline_latency: int = 4

    def __post_init__(self):
        if self.parallelism < 1 or int(self.parallelism) != self.parallelism:
            raise ConfigError("parallelism must be a positive integer")
        if self.clock_mhz <= 0:
            raise ConfigError("clock must be positive")
        if self.pipeline_latency < 0:
            raise ConfigError("pipeline latency cannot be negative")


@dataclass(frozen=True)
class CyclePrediction:
    cycles: float
    clock_mhz: float

    @property
    def time_ms(self) -> float:
        return self.cycles / (self.clock_mhz * 1000.0)


@dataclass(frozen=True)
class PackedMatrix:
    """A 15-row GF(16) matrix as one 60-bit word per column (row j at bits 4j)."""

    cols: int
    words: tuple

    def __post_init__(self):
        if self.cols < 1 or len(self.words) != self.cols:
            raise DimensionError("word count must match the column count")
        for w in self.words:
            if w >> WORD_BITS:
                raise ValueError("column word exceeds 60 bits")

    def unpack(self) -> Matrix:
        data = bytearray(PACKED_ROWS * self.cols)
        for c, w in enumerate(self.words):
            for j in range(PACKED_ROWS):
                data[j * self.cols + c] = (w >> (4 * j)) & 0xF
        return _unchecked(PACKED_ROWS, self.cols, bytes(data))


def pack(m: Matrix) -> PackedMatrix:
    if m.rows != PACKED_ROWS:
        raise DimensionError(f"packing needs exactly {PACKED_ROWS} rows, got {m.rows}")
    data = m.data
    cols = m.cols
    words = []
    for c in range(cols):
        w = 0
        for j in range(PACKED_ROWS):
            w |= data[j * cols + c] << (4 * j)
        words.append(w)
    return PackedMatrix(cols, tuple(words))


def _xtime_word(w: int) -> int:
    # multiply every packed element by x, reducing with x^4 = x + 1
    top = w & _MASK_TOP
    return ((w & _MASK_LOW3) << 1) ^ (top >> 3) ^ (top >> 2)


def _scale_word(a: int, w: int) -> int:
    acc = 0
    if a & 1:
        acc = w
    w = _xtime_word(w)
    if a & 2:
        acc ^= w
    w = _xtime_word(w)
    if a & 4:
        acc ^= w
    w = _xtime_word(w)
    if a & 8:
        acc ^= w
    return acc


def accel_scalar_mat_sum(alphas, packed_mats, cfg: AccelConfig = AccelConfig()):
    """Evaluate sum_j alphas[j] * mats[j] the way the engine would.

    Returns the exact GF(16) result together with the cycle prediction
    ceil(k*n/P) + pipeline_latency.
    """
    if len(alphas) != len(packed_mats):
        raise DimensionError(f"{len(alphas)} scalars for {len(packed_mats)} matrices")
    if not packed_mats:
        raise DimensionError("empty linear combination")
    cols = packed_mats[0].cols
    acc = [0] * cols
    for a, pm in zip(alphas, packed_mats):
        if pm.cols != cols:
            raise DimensionError(f"column count mismatch {pm.cols} vs {cols}")
        if not 0 <= a < 16:
            raise ValueError("field elements must be in range(16)")
        words = pm.words
        for c in range(cols):
            acc[c] ^= _scale_word(a, words[c])
    cycles = -(-len(packed_mats) * cols // cfg.parallelism) + cfg.pipeline_latency
    result = PackedMatrix(cols, tuple(acc)).unpack()
    return result, CyclePrediction(cycles, cfg.clock_mhz)


def keccak_cycles(
    invocations, overhead_cycles: int = 0, clock_mhz: float = DEFAULT_CLOCK_MHZ
) -> CyclePrediction:
    """Cycle cost of `invocations` permutations on the 24-cycle Keccak core."""
    if invocations < 0:
        raise ValueError("invocation count cannot be negative")
    if overhead_cycles < 0:
        raise ValueError("overhead cannot be negative")
    return CyclePrediction(
        (KECCAK_CYCLES_PER_PERMUTE + overhead_cycles) * invocations, clock_mhz
    )


# ---------------------------------------------------------------------------
# workload model: how often each accelerated kernel runs per operation

OPERATIONS = ("keygen", "sign", "open")


def scalar_mat_sum_invocations(params: ParameterSet, operation: str) -> int:
    """Scalar-matrix-sum evaluations per keygen/sign/open call."""
    if operation == "keygen":
        return 1
    if operation == "sign":
        return params.tau * params.n_parties
    if operation == "open":
        return params.tau * (params.n_parties - 1)
    raise ValueError(f"unknown operation {operation!r}")


def _fe(count: int) -> int:
    # bytes a PRNG read consumes to produce `count` field elements
    return (count + 1) // 2


def _prng_folds(nbytes: int) -> int:
    return -(-nbytes // PRNG_RATE)


def _hash_folds(chunk_lens) -> int:
    absorbed = 1 + sum(8 + n for n in chunk_lens)
    return absorbed // HASH_RATE + 1


def keccak_invocations(params: ParameterSet, operation: str, message_len: int = 0):
    """Permutation count per operation, from the sponge byte flows.

    keygen and sign counts are exact (sign assumes the party-selection
    stream never rejects, which holds whenever 256 is a multiple of
    n_parties).  open depends on which parties each round leaves unopened,
    so its count is the expectation over a uniform choice and is returned
    as a float.  sign/open assume the public matrices are already expanded
    (long-lived key); key expansion is charged to keygen.
    """
    p = params
    cols_left = p.cols_left
    digest = _hash_folds([16, p.m_rows * cols_left])
    share_reg = _prng_folds(
        _fe(p.k) + _fe(p.r * cols_left) + _fe(p.s * p.r) + _fe(p.s * cols_left)
    )
    share_last = _prng_folds(_fe(p.s * p.r))
    com_reg = _hash_folds([32, 2, 2, 16])
    aux_len = p.k + p.r * cols_left + p.s * cols_left
    com_last = _hash_folds([32, 2, 2, 16, aux_len])
    h1 = _hash_folds([message_len, 32, 32, p.tau * p.n_parties * 32])
    proj = _prng_folds(p.tau * _fe(p.s * p.m_rows))
    round_chunk = -(-p.n_parties * p.s * p.n_cols // 2)
    h2 = _hash_folds([32] + [round_chunk] * p.tau)
    select = _prng_folds(p.tau)
    tail = h1 + proj + h2 + select

    if operation == "keygen":
        sk_stream = _prng_folds(_fe(p.k) + _fe(p.r * cols_left))
        pk_stream = _prng_folds(p.k * _fe(p.m_rows * p.n_cols) + _fe(p.m_rows * p.r))
        return sk_stream + pk_stream
    if operation == "sign":
        rand = _prng_folds(32 + 16 * p.tau * p.n_parties)
        n1 = p.n_parties - 1
        per_round = n1 * share_reg + share_last + n1 * com_reg + com_last
        return digest + rand + p.tau * per_round + tail
    if operation == "open":
        n2 = p.n_parties - 2
        unopened_other = n2 * share_reg + share_last + n2 * com_reg + com_last
        unopened_last = (p.n_parties - 1) * (share_reg + com_reg)
        per_round = (
            (p.n_parties - 1) * unopened_other + unopened_last
        ) / p.n_parties
        return digest + p.tau * per_round + tail
    raise ValueError(f"unknown operation {operation!r}")


# ---------------------------------------------------------------------------
# cut composition and runtime prediction

@dataclass(frozen=True)
class CutComposition:
    """Which profile stages a cut moves to hardware, and which of the
    remaining software stages its accelerators may overlap with."""

    name: str
    accel_stages: frozenset
    overlap_stages: frozenset = frozenset()
    clock_mhz: float = None

    def __post_init__(self):
        object.__setattr__(self, "accel_stages", frozenset(self.accel_stages))
        object.__setattr__(self, "overlap_stages", frozenset(self.overlap_stages))
        if not self.name:
            raise ConfigError("composition needs a name")
        for s in self.accel_stages | self.overlap_stages:
            if s not in STAGE_ORDER:
                raise ConfigError(f"unknown stage {s!r}")
        bad = self.accel_stages - HW_STAGES
        if bad:
            raise ConfigError(f"no hardware model for stage(s) {sorted(bad)}")
        k = self.accel_stages & KECCAK_STAGES
        if k and k != KECCAK_STAGES:
            raise ConfigError("the Keccak stages accelerate only as a unit")
        overlap_bad = self.overlap_stages & self.accel_stages
        if overlap_bad:
            raise ConfigError(
                f"stage(s) {sorted(overlap_bad)} cannot overlap with themselves"
            )
        if self.clock_mhz is not None and self.clock_mhz <= 0:
            raise ConfigError("clock must be positive")


@dataclass(frozen=True)
class PredictedRuntime:
    t_keygen_ms: float
    t_sign_ms: float
    t_open_ms: float
    details: dict  # operation -> {sw_ms, accel_ms, hw_ms, overlap_ms, t_ms}

    def time_ms(self, operation: str) -> float:
        return self.details[operation]["t_ms"]


def predict_cut_runtime(
    cut: CutComposition,
    params: ParameterSet,
    profile: SoftwareProfile,
    cfg: AccelConfig = AccelConfig(),
    message_len: int = 0,
) -> PredictedRuntime:
    """Predict keygen/sign/open times for a cut over a measured profile.

    Accelerated stage times are removed from the software total; the
    hardware time that exceeds the overlap window is added back.
    """
    clock = cut.clock_mhz if cut.clock_mhz is not None else cfg.clock_mhz
    engine_cycles = (
        -(-params.k * params.n_cols // cfg.parallelism) + cfg.pipeline_latency
    )
    details = {}
    for op in OPERATIONS:
        sw_total = profile.total_ms(op)
        accel_ms = sum(profile.stage_ms(op, s) for s in cut.accel_stages)
        overlap_ms = sum(profile.stage_ms(op, s) for s in cut.overlap_stages)
        hw_cycles = 0.0
        if "scalar_mat_sum" in cut.accel_stages:
            hw_cycles += scalar_mat_sum_invocations(params, op) * engine_cycles
        if KECCAK_STAGES <= cut.accel_stages:
            hw_cycles += (
                keccak_invocations(params, op, message_len)
                * KECCAK_CYCLES_PER_PERMUTE
            )
        hw_ms = hw_cycles / (clock * 1000.0)
        t = sw_total - accel_ms + max(0.0, hw_ms - overlap_ms)
        details[op] = {
            "sw_ms": sw_total,
            "accel_ms": accel_ms,
            "hw_ms": hw_ms,
            "overlap_ms": overlap_ms,
            "t_ms": t,
        }
    return PredictedRuntime(
        details["keygen"]["t_ms"],
        details["sign"]["t_ms"],
        details["open"]["t_ms"],
        details,
    )
