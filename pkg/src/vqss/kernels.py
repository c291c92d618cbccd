"""Backend selection for the statevector kernels.

The compiled extension is used when it imports; setting ``VQSS_PURE_PYTHON=1``
forces the numpy fallback. ``use_backend`` switches at runtime (tests and the
benchmark compare both).
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

_active = None

# The direct O(d^2) projection beats numpy's FFT only for small d; measured
# crossover is near d = 100 (see benchmarks/bench_kernels.py).
DIRECT_PROBS_MAX_D = 97


def _hybrid_probs(amps, roots, k, out):
    if amps.shape[0] <= DIRECT_PROBS_MAX_D:
        _ckernels.mub_probs(amps, roots, k, out)
    else:
        _pykernels.mub_probs(amps, roots, k, out)


def use_backend(name):
    global _active, phase_apply, mub_fill, mub_probs, sample_index
    try:
        mod = BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
    phase_apply = mod.phase_apply
    mub_fill = mod.mub_fill
    mub_probs = _hybrid_probs if mod is _ckernels else mod.mub_probs
    sample_index = mod.sample_index
    _active = name


def backend():
    return _active


use_backend(
    "python"
    if os.environ.get("VQSS_PURE_PYTHON") or _ckernels is None
    else "compiled"
)
