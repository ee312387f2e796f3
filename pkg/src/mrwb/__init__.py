"""MinRank MPC-in-the-head signature workbench.

Reference GF(16) implementation of the signature scheme, an instrumented
software profiler, a cycle-level accelerator cost model, and design-space
search over measured hardware/software cuts.
"""

from .mpcith import PRESETS, ParameterSet

__version__ = "0.1.0"

__all__ = ["PRESETS", "ParameterSet", "__version__"]
