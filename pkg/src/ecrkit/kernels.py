"""Union-find connected-components kernels.

The clustering hot path reduces to merging integer node pairs, so the kernel
is JIT-compiled with numba. Setting ``ECRKIT_NO_NUMBA=1`` (checked per call)
selects the pure-NumPy/Python fallback instead; ``ecrkit bench
--kernel both`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


NO_NUMBA_ENV = "ECRKIT_NO_NUMBA"


def _components_impl(n, us, vs):
    parent = np.arange(n, dtype=np.int64)
    for i in range(us.shape[0]):
        a = us[i]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = vs[i]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            # union by index keeps the result deterministic
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    for i in range(n):
        root = i
        while parent[root] != root:
            root = parent[root]
        parent[i] = root
    return parent


_components_py = _components_impl
_components_nb = njit(cache=True)(_components_impl) if HAS_NUMBA else None


def use_numba() -> bool:
    return HAS_NUMBA and os.environ.get(NO_NUMBA_ENV, "") not in ("1", "true", "yes")


def component_labels(n: int, us: np.ndarray, vs: np.ndarray,
                     kernel: str = "auto") -> np.ndarray:
    """Root label per node in [0, n) after merging every (us[i], vs[i]) pair.

    ``kernel`` is ``auto`` (env-controlled), ``numba``, or ``python``.
    """
    us = np.ascontiguousarray(us, dtype=np.int64)
    vs = np.ascontiguousarray(vs, dtype=np.int64)
    if us.shape != vs.shape:
        raise ValueError("edge endpoint arrays differ in length")
    if us.size and (us.min() < 0 or vs.min() < 0
                    or us.max() >= n or vs.max() >= n):
        raise ValueError("edge endpoint outside [0, n)")
    if kernel == "numba" or (kernel == "auto" and use_numba()):
        if _components_nb is None:
            raise RuntimeError("numba kernel requested but numba is unavailable")
        return _components_nb(n, us, vs)
    if kernel in ("python", "auto"):
        return _components_py(n, us, vs)
    raise ValueError(f"unknown kernel {kernel!r}")
