"""Hot-loop kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise
the numpy versions in ``_pykernels`` are.  Set ``LHRHYTHM_KERNELS=numpy`` to
force the fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"numpy": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_requested = os.environ.get("LHRHYTHM_KERNELS", "").strip().lower()
if _requested and _requested not in _BACKENDS:
    raise ImportError(f"LHRHYTHM_KERNELS={_requested!r} is not available; "
                      f"built backends: {sorted(_BACKENDS)}")
DEFAULT = _requested or ("cython" if "cython" in _BACKENDS else "numpy")


def available():
    return sorted(_BACKENDS)


def load(name=None):
    """Return the kernel module ``name`` (default: the import-time selection)."""
    if name is None:
        name = DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {available()}") from None
