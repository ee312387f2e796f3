"""Exhaustive HW/SW partition selection over a measured block library.

Each library entry is one hardware/software cut with measured runtimes and
FPGA resource usage.  A usage profile weights the workload as
T = sign_weight * t_sign + open_count * t_open (key generation is a one-off
and stays out of the objective).  Solvers scan every entry, so results are
exact optima for the library given.
"""

import csv
import io
import math
from dataclasses import dataclass

RESOURCE_DIMS = ("kluts", "kffs", "brams", "dsps")

# entries that predate split DSP reporting are charged the observed worst case
DEFAULT_DSPS = 2.0


@dataclass(frozen=True)
class CutEntry:
    """Measured runtimes (ms) and resource usage for one partition."""

    name: str
    t_keygen_ms: float
    t_sign_ms: float
    t_open_ms: float
    kluts: float
    kffs: float
    brams: float
    dsps: float = DEFAULT_DSPS

    def __post_init__(self):
        if not self.name:
            raise ValueError("cut entry needs a name")
        for f in ("t_keygen_ms", "t_sign_ms", "t_open_ms"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{self.name}: {f} must be strictly positive")
        for f in RESOURCE_DIMS:
            if getattr(self, f) < 0:
                raise ValueError(f"{self.name}: {f} must be non-negative")

    def resource(self, dim: str) -> float:
        if dim not in RESOURCE_DIMS:
            raise ValueError(f"unknown resource dimension {dim!r}")
        return getattr(self, dim)


@dataclass(frozen=True)
class BlockLibrary:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("block library is empty")
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate cut names in library")

    def get(self, name: str) -> CutEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


@dataclass(frozen=True)
class PkiProfile:
    """Workload mix: fractional signer share, integral verification fan-out.

    keygen_weight extends the usual runtime objective with a key-setup
    share; it defaults to 0 so keys are treated as a one-off cost.
    """

    sign_weight: float = 1.0
    open_count: int = 1
    keygen_weight: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.sign_weight <= 1.0:
            raise ValueError("sign_weight must lie in [0, 1]")
        if self.open_count < 0 or int(self.open_count) != self.open_count:
            raise ValueError("open_count must be a non-negative integer")
        if self.keygen_weight < 0:
            raise ValueError("keygen_weight must be non-negative")


@dataclass(frozen=True)
class ResourceBudget:
    max_kluts: float = None
    max_kffs: float = None
    max_brams: float = None
    max_dsps: float = None

    def bound(self, dim: str) -> float:
        if dim not in RESOURCE_DIMS:
            raise ValueError(f"unknown resource dimension {dim!r}")
        return getattr(self, "max_" + dim)


def total_runtime(entry: CutEntry, profile: PkiProfile) -> float:
    t = profile.sign_weight * entry.t_sign_ms + profile.open_count * entry.t_open_ms
    if profile.keygen_weight:
        t += profile.keygen_weight * entry.t_keygen_ms
    return t


@dataclass(frozen=True)
class EvaluatedEntry:
    entry: CutEntry
    total_ms: float
    feasible: bool
    objective: float
    violated: str = None  # most-exceeded constraint when infeasible


@dataclass(frozen=True)
class SolveReport:
    objective_label: str
    evaluated: tuple
    winner: CutEntry = None

    @property
    def feasible(self) -> bool:
        return self.winner is not None

    @property
    def ranking(self):
        return tuple(ee for ee in self.evaluated if ee.feasible)

    @property
    def objective_value(self) -> float:
        if self.winner is None:
            raise ValueError("no feasible entry, no objective value")
        return self.ranking[0].objective

    def min_total_ms(self) -> float:
        return min(ee.total_ms for ee in self.evaluated)


def _budget_violation(entry: CutEntry, budget: ResourceBudget):
    """Return the most-exceeded dimension, or None when within budget."""
    worst = None
    worst_ratio = 1.0
    for dim in RESOURCE_DIMS:
        bound = budget.bound(dim)
        if bound is None:
            continue
        value = entry.resource(dim)
        if value <= bound:
            continue
        ratio = value / bound if bound > 0 else math.inf
        if worst is None or ratio > worst_ratio:
            worst, worst_ratio = dim, ratio
    return worst


def solve_pr(lib: BlockLibrary, profile: PkiProfile, budget: ResourceBudget) -> SolveReport:
    """Fastest entry whose resources fit the budget (ties: kLUTs, BRAMs, name)."""
    evaluated = []
    for e in lib.entries:
        t = total_runtime(e, profile)
        violated = _budget_violation(e, budget)
        evaluated.append(EvaluatedEntry(e, t, violated is None, t, violated))
    evaluated.sort(
        key=lambda ee: (
            not ee.feasible,
            ee.total_ms,
            ee.entry.kluts,
            ee.entry.brams,
            ee.entry.name,
        )
    )
    winner = evaluated[0].entry if evaluated[0].feasible else None
    return SolveReport("total_ms", tuple(evaluated), winner)


def solve_pt(
    lib: BlockLibrary, profile: PkiProfile, t_cap_ms: float, objective: str = "kluts"
) -> SolveReport:
    """Cheapest entry (in one resource) meeting the runtime cap (ties: runtime, name)."""
    if objective not in RESOURCE_DIMS:
        raise ValueError(f"unknown resource dimension {objective!r}")
    if t_cap_ms <= 0:
        raise ValueError("runtime cap must be positive")
    evaluated = []
    for e in lib.entries:
        t = total_runtime(e, profile)
        ok = t <= t_cap_ms
        evaluated.append(
            EvaluatedEntry(e, t, ok, e.resource(objective), None if ok else "total_ms")
        )
    evaluated.sort(
        key=lambda ee: (not ee.feasible, ee.objective, ee.total_ms, ee.entry.name)
    )
    winner = evaluated[0].entry if evaluated[0].feasible else None
    return SolveReport(objective, tuple(evaluated), winner)


@dataclass(frozen=True)
class ParetoPoint:
    entry: CutEntry
    total_ms: float
    resource_value: float


def pareto_front(lib: BlockLibrary, profile: PkiProfile, resource: str = "kluts"):
    """Non-dominated entries in the (runtime, resource) plane, runtime-sorted."""
    if resource not in RESOURCE_DIMS:
        raise ValueError(f"unknown resource dimension {resource!r}")
    pts = [
        ParetoPoint(e, total_runtime(e, profile), e.resource(resource))
        for e in lib.entries
    ]

    def dominates(a, b):
        return (
            a.total_ms <= b.total_ms
            and a.resource_value <= b.resource_value
            and (a.total_ms < b.total_ms or a.resource_value < b.resource_value)
        )

    front = [p for p in pts if not any(dominates(q, p) for q in pts)]
    front.sort(key=lambda p: (p.total_ms, p.resource_value, p.entry.name))
    return tuple(front)


def export_plot_data(result) -> str:
    """CSV rows (name,t_ms,kluts,kffs,brams,feasible) for a report or front."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "t_ms", "kluts", "kffs", "brams", "feasible"])
    if isinstance(result, SolveReport):
        rows = [(ee.entry, ee.total_ms, ee.feasible) for ee in result.evaluated]
    else:
        rows = [(p.entry, p.total_ms, True) for p in result]
    for entry, t, ok in rows:
        w.writerow(
            [entry.name, repr(t), repr(entry.kluts), repr(entry.kffs),
             repr(entry.brams), "true" if ok else "false"]
        )
    return buf.getvalue()
