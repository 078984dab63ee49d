"""Hot inner loops with two interchangeable backends.

The compiled (numba) backend is used when numba imports cleanly; setting
``KLAB_DISABLE_NUMBA=1`` forces the pure-numpy backend. Both backends expose
the same functions and are tested against each other.

Kernels assume every modulus is below ``KERNEL_MAX_MODULUS`` so that a
product of two reduced residues fits in a signed 64-bit integer; callers
route larger moduli through exact Python-int code instead.
"""
import os
from types import ModuleType

from . import _numpy

KERNEL_MAX_MODULUS = (1 << 31) - 1

_numba: ModuleType | None
try:
    from . import _numba
except ImportError:  # numba missing or broken
    _numba = None

_disabled = os.environ.get("KLAB_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
BACKEND = "numpy" if (_disabled or _numba is None) else "numba"

_active = _numpy if BACKEND == "numpy" else _numba

NAMES = (
    "batch_inverse",
    "expsum",
    "expsum_weighted",
    "bilinear_expsum",
    "cyclic_tally_step",
    "product_tally_step",
    "lattice_count",
    "spf_sieve",
    "lpf_from_spf",
    "top_factors",
    "smooth_count",
)

batch_inverse = _active.batch_inverse
expsum = _active.expsum
expsum_weighted = _active.expsum_weighted
bilinear_expsum = _active.bilinear_expsum
cyclic_tally_step = _active.cyclic_tally_step
product_tally_step = _active.product_tally_step
lattice_count = _active.lattice_count
spf_sieve = _active.spf_sieve
lpf_from_spf = _active.lpf_from_spf
top_factors = _active.top_factors
smooth_count = _active.smooth_count


def available_backends() -> dict[str, ModuleType]:
    found = {"numpy": _numpy}
    if _numba is not None:
        found["numba"] = _numba
    return found


def backend(name: str) -> ModuleType:
    """Return the kernel module for ``name`` ("numba" or "numpy")."""
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None
