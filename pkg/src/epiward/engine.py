"""Simulation backend selection.

Prefers the compiled kernel, falls back to the pure-Python one. Set
EPIWARD_BACKEND=python to force the fallback (used by the backend benchmark
and the cross-backend tests).
"""

import os

if os.environ.get("EPIWARD_BACKEND", "").lower() == "python":
    from ._simcore_py import simulate_path

    BACKEND = "python"
else:
    try:
        from ._simcore import simulate_path  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from ._simcore_py import simulate_path  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["simulate_path", "BACKEND"]
