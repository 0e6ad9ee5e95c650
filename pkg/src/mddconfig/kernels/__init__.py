"""Backend selection for the numeric kernels.

Two interchangeable implementations exist: `numba_backend` (JIT-compiled,
the default when numba imports cleanly) and `numpy_backend` (vectorized
fallback). Set the environment variable ``MDDCONFIG_NO_NUMBA=1`` to force
the numpy path; `set_backend` switches at runtime, which the benchmark uses
to compare both in one process.
"""

from __future__ import annotations

import os

from . import numpy_backend

ENV_FLAG = "MDDCONFIG_NO_NUMBA"

_backends = {"numpy": numpy_backend}
try:
    from . import numba_backend

    _backends["numba"] = numba_backend
except ImportError:  # numba missing or broken; numpy carries on
    numba_backend = None


def _env_says_no_numba() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


_active = (
    _backends["numba"]
    if "numba" in _backends and not _env_says_no_numba()
    else _backends["numpy"]
)


def active():
    return _active


def backend_name() -> str:
    return _active.NAME


def available_backends() -> list[str]:
    return sorted(_backends)


def get_backend(name: str):
    try:
        return _backends[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}") from None


def set_backend(name: str):
    global _active
    _active = get_backend(name)


def warmup(backend=None):
    """Run every kernel once on a two-edge diagram so JIT compilation cost
    is paid before anything is timed."""
    import numpy as np

    b = backend or _active
    num_nodes = 3
    els = np.array([0, 1, 2], dtype=np.int64)
    src = np.array([0, 1], dtype=np.int64)
    dst = np.array([1, 2], dtype=np.int64)
    val = np.array([0, 0], dtype=np.int64)
    layer = np.array([0, 1], dtype=np.int64)
    fcost = np.array([1.0, 2.0])
    icost = np.array([1, 2], dtype=np.int64)
    up, down = b.scalar_labels(num_nodes, els, src, dst, fcost)
    b.scalar_domain_mask(2, 1, layer, val, src, dst, fcost, up, down, 10.0)
    b.path_filter(num_nodes, els, src, dst, np.ones(2, dtype=bool))
    in_start = np.array([0, 0, 1, 2], dtype=np.int64)
    in_edges = np.array([0, 1], dtype=np.int64)
    out_start = np.array([0, 1, 2, 2], dtype=np.int64)
    us, ul, uf = b.pareto_up(num_nodes, in_start, in_edges, src, icost, icost, 10, 10)
    ds, dl, df = b.pareto_down(num_nodes, out_start, dst, icost, icost, 10, 10)
    b.pareto_domain_mask(
        2, 1, src, dst, val, layer, icost, icost, us, ul, uf, ds, dl, df, 10, 10
    )
