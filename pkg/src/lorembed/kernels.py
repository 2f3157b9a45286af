"""Kernel selection: compiled extension if importable, numpy fallback if not.

Set LOREMBED_PURE=1 to force the fallback (used by the benchmark and tests).
"""

from __future__ import annotations

import os

from lorembed._kernels_py import csr_longest_path_py, grid_longest_path_np

try:
    from lorembed._speedups import csr_longest_path as _csr_longest_path_ext
except ImportError:
    _csr_longest_path_ext = None

HAVE_COMPILED = _csr_longest_path_ext is not None
_FORCE_PURE = os.environ.get("LOREMBED_PURE", "") not in ("", "0")
USING_COMPILED = HAVE_COMPILED and not _FORCE_PURE

csr_longest_path_compiled = _csr_longest_path_ext


def backend_name() -> str:
    return "compiled" if USING_COMPILED else "pure"


def longest_path_from(dag, source_index: int):
    """Longest-path distances from one node to all nodes of a causal DAG."""
    if USING_COMPILED:
        return _csr_longest_path_ext(dag.indptr, dag.indices, dag.weights,
                                     source_index)
    if dag.grid_shape is not None:
        return grid_longest_path_np(dag.grid_shape, dag.offsets, dag.wtable,
                                    source_index)
    return csr_longest_path_py(dag.indptr, dag.indices, dag.weights,
                               source_index)
