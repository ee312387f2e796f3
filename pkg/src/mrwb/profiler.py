"""Stage-level timing of keygen/sign/open on the pure-software path.

Wall time is split across a fixed stage vocabulary by temporarily wrapping
the hot kernels with scoped timers.  Attribution is exclusive: while a
nested instrumented call runs, its parent's clock is paused, so the squeeze
stage never double-counts permutation time.  Whatever the wrappers do not
see lands in the catch-all "others" row and the seven rows always sum to
the measured wall time.
"""

import csv
import io
import statistics
import time
from contextlib import contextmanager
from dataclasses import dataclass

from . import gf16, keccak, mpcith
from .mpcith import ParameterSet

STAGE_ORDER = (
    "mat_arith",
    "scalar_mat_sum",
    "mat_prod",
    "keccak_permute",
    "keccak_squeeze",
    "keccak_absorb",
    "others",
)

OPERATIONS = ("keygen", "sign", "open")

# per-run stage times below this are measurement noise; fold them into others
NOISE_FLOOR_S = 1e-5


class _StageClock:
    """Exclusive-time accumulator over a stack of nested stage scopes."""

    __slots__ = ("totals", "_stack")

    def __init__(self):
        self.totals = {s: 0.0 for s in STAGE_ORDER}
        self._stack = []

    def enter(self, stage):
        now = time.perf_counter()
        stack = self._stack
        if stack:
            pstage, pstart = stack[-1]
            self.totals[pstage] += now - pstart
        stack.append((stage, now))

    def exit(self):
        stage, start = self._stack.pop()
        now = time.perf_counter()
        self.totals[stage] += now - start
        if self._stack:
            self._stack[-1] = (self._stack[-1][0], now)


def _scoped(clock, stage, func):
    def wrapper(*args, **kwargs):
        clock.enter(stage)
        try:
            return func(*args, **kwargs)
        finally:
            clock.exit()

    return wrapper


@contextmanager
def _instrumented(clock):
    targets = (
        (gf16, "mat_add", "mat_arith"),
        (gf16, "scalar_mat_sum", "scalar_mat_sum"),
        (gf16, "mat_mul", "mat_prod"),
        (keccak, "keccak_f1600", "keccak_permute"),
        (keccak.Sponge, "squeeze", "keccak_squeeze"),
        (keccak.Sponge, "absorb", "keccak_absorb"),
    )
    saved = [(obj, name, getattr(obj, name)) for obj, name, _ in targets]
    try:
        for obj, name, stage in targets:
            setattr(obj, name, _scoped(clock, stage, getattr(obj, name)))
        yield
    finally:
        for obj, name, func in saved:
            setattr(obj, name, func)


@dataclass(frozen=True)
class SoftwareProfile:
    """Mean/stddev milliseconds per stage for each operation."""

    stages: dict  # operation -> stage -> (mean_ms, std_ms)
    runs: int = 1

    def operations(self):
        return tuple(self.stages)

    def stage_ms(self, operation, stage):
        if stage not in STAGE_ORDER:
            raise ValueError(f"unknown stage {stage!r}")
        return self.stages[operation][stage][0]

    def stage_std_ms(self, operation, stage):
        return self.stages[operation][stage][1]

    def total_ms(self, operation):
        return sum(self.stages[operation][s][0] for s in STAGE_ORDER)

    def percent(self, operation, stage):
        total = self.total_ms(operation)
        if total == 0:
            return 0.0
        return 100.0 * self.stage_ms(operation, stage) / total


def _measure(fn, runs):
    """Run fn() `runs` times under instrumentation, return per-stage ms lists."""
    samples = {s: [] for s in STAGE_ORDER}
    for _ in range(runs):
        clock = _StageClock()
        with _instrumented(clock):
            t0 = time.perf_counter()
            fn()
            wall = time.perf_counter() - t0
        row = dict(clock.totals)
        for s in STAGE_ORDER:
            if s != "others" and row[s] < NOISE_FLOOR_S:
                row[s] = 0.0
        timed = sum(row[s] for s in STAGE_ORDER if s != "others")
        row["others"] = max(wall - timed, 0.0)
        for s in STAGE_ORDER:
            samples[s].append(row[s] * 1e3)
    return samples


def _summarize(samples):
    out = {}
    for s in STAGE_ORDER:
        vals = samples[s]
        mean = statistics.fmean(vals)
        std = statistics.stdev(vals) if len(vals) > 1 else 0.0
        out[s] = (mean, std)
    return out


def profile(params: ParameterSet, runs: int = 1000, message: bytes = b"", seed: bytes = b"profile") -> SoftwareProfile:
    """Measure keygen/sign/open stage breakdowns at the given parameters.

    The workload content is derived from `seed` so repeated calls time the
    same computation.  Each run uses a fresh keypair to keep cached key
    digests out of the numbers.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    rng = keccak.Prng(seed, tag=0xFE)
    mpcith.public_key_digest.cache_clear()

    pk, sk = mpcith.keygen(params, rng.read(32))
    # expand once up front so sign/open time the steady state of a
    # long-lived key rather than first-use key expansion
    mpcith.public_matrices(pk)
    keygen_rand = [rng.read(32) for _ in range(runs)]
    sign_rand = [rng.read(32) for _ in range(runs)]
    stages = {}

    idx = iter(range(runs))
    stages["keygen"] = _summarize(
        _measure(lambda: mpcith.keygen(params, keygen_rand[next(idx)]), runs)
    )

    sigs = []
    idx2 = iter(range(runs))

    def run_sign():
        mpcith.public_key_digest.cache_clear()
        sigs.append(mpcith.sign(sk, message, sign_rand[next(idx2)]))

    stages["sign"] = _summarize(_measure(run_sign, runs))

    idx3 = iter(range(runs))

    def run_open():
        mpcith.public_key_digest.cache_clear()
        if not mpcith.open(pk, message, sigs[next(idx3)]):
            raise RuntimeError("instrumented verification rejected a valid signature")

    stages["open"] = _summarize(_measure(run_open, runs))

    return SoftwareProfile(stages, runs)


def emit_profile_csv(prof: SoftwareProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["operation", "stage", "mean_ms", "std_ms"])
    for op in prof.operations():
        for s in STAGE_ORDER:
            mean, std = prof.stages[op][s]
            w.writerow([op, s, repr(mean), repr(std)])
    return buf.getvalue()


def load_profile_csv(text: str) -> SoftwareProfile:
    rd = csv.reader(io.StringIO(text))
    header = next(rd, None)
    if header != ["operation", "stage", "mean_ms", "std_ms"]:
        raise ValueError("unrecognized profile header")
    stages = {}
    for row in rd:
        if not row:
            continue
        if len(row) != 4:
            raise ValueError(f"malformed profile row: {row!r}")
        op, stage, mean, std = row
        if stage not in STAGE_ORDER:
            raise ValueError(f"unknown stage {stage!r}")
        try:
            pair = (float(mean), float(std))
        except ValueError:
            raise ValueError(f"non-numeric timing in row: {row!r}") from None
        stages.setdefault(op, {})[stage] = pair
    for op, table in stages.items():
        missing = [s for s in STAGE_ORDER if s not in table]
        if missing:
            raise ValueError(f"{op}: missing stages {missing}")
    if not stages:
        raise ValueError("empty profile")
    return SoftwareProfile(stages)


def emit_breakdown(prof: SoftwareProfile, format: str = "table") -> str:
    """Per-stage means and shares, as a fixed-width table or CSV rows."""
    if format == "csv":
        return emit_profile_csv(prof)
    if format != "table":
        raise ValueError(f"unknown breakdown format {format!r}")
    lines = []
    for op in prof.operations():
        total = prof.total_ms(op)
        lines.append(f"{op}  (total {total:.2f} ms over {prof.runs} run(s))")
        for s in STAGE_ORDER:
            mean, std = prof.stages[op][s]
            lines.append(
                f"  {s:<16} {mean:>10.3f} ms  {prof.percent(op, s):>6.2f} %"
                + (f"  (+/- {std:.3f})" if std else "")
            )
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
