"""Kernel backend selection.

The compiled module is preferred. Setting ``KCM_PURE_PYTHON=1`` in the
environment forces the pure-Python fallback, which is also used whenever the
extension has not been built.
"""
import os

from . import _pykernels

_NAMES = (
    "rel_to_perm",
    "rel_to_perm_rows",
    "perm_to_rel",
    "count_inversions",
    "inversion_profile",
    "lis_length",
    "greedy_walk",
    "deck_moments",
    "total_moments",
)


def _load():
    if os.environ.get("KCM_PURE_PYTHON", "") not in ("", "0"):
        return _pykernels, "python"
    try:
        from . import _ckernels
    except ImportError:
        return _pykernels, "python"
    return _ckernels, "cython"


_impl, BACKEND = _load()

rel_to_perm = _impl.rel_to_perm
rel_to_perm_rows = _impl.rel_to_perm_rows
perm_to_rel = _impl.perm_to_rel
count_inversions = _impl.count_inversions
inversion_profile = _impl.inversion_profile
lis_length = _impl.lis_length
greedy_walk = _impl.greedy_walk
deck_moments = _impl.deck_moments
total_moments = _impl.total_moments


def available_backends():
    """Map backend name -> kernel module for every backend importable here."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
