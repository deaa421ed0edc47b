"""Hot-kernel backend selection.

The compiled extension is used when available; set HIERBAYES_PURE_PYTHON=1
to force the numpy fallback (used by the benchmark and the equivalence
tests).
"""

import os

if os.environ.get("HIERBAYES_PURE_PYTHON"):
    from ._pure import BACKEND, ball_counts
else:
    try:
        from ._ballcount import BACKEND, ball_counts
    except ImportError:
        from ._pure import BACKEND, ball_counts

__all__ = ["BACKEND", "ball_counts"]
