"""Hot loops, backed by the compiled extension when it is importable.

Set ``DOCEMBED_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

if os.environ.get("DOCEMBED_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl
        BACKEND = "python"

weighted_row_sums = _impl.weighted_row_sums
pair_cosines = _impl.pair_cosines
doubled_positive_rank_sum = _impl.doubled_positive_rank_sum

__all__ = ["BACKEND", "weighted_row_sums", "pair_cosines", "doubled_positive_rank_sum"]
