"""Hot-loop kernels: compiled core when available, pure Python otherwise.

Set ``SUBSTRACE_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the backend-equivalence tests).
"""

import os

if os.environ.get("SUBSTRACE_PURE_PYTHON"):
    from . import _pure as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "python"

replay_changes = _impl.replay_changes
bass_rk4 = _impl.bass_rk4

__all__ = ["BACKEND", "replay_changes", "bass_rk4"]
