"""Optional numba acceleration.

Hot kernels are written once in a numba-compatible subset of Python and
decorated with :func:`jit`.  When numba is unavailable, or the environment
variable ``WALKLEMMA_DISABLE_NUMBA`` is set to a non-empty value other than
``0``, the decorator is the identity and the same source runs as plain
numpy/Python.
"""
import os

_flag = os.environ.get("WALKLEMMA_DISABLE_NUMBA", "")
DISABLED = _flag not in ("", "0")

try:
    if DISABLED:
        raise ImportError
    import numba as _numba
except ImportError:  # pragma: no cover - depends on environment
    _numba = None

HAVE_NUMBA = _numba is not None


def jit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when enabled, otherwise a no-op."""
    if func is None:
        return lambda f: jit(f, **kwargs)
    if _numba is None:
        return func
    kwargs.setdefault("cache", True)
    return _numba.njit(**kwargs)(func)


def backend():
    return "numba" if HAVE_NUMBA else "python"
