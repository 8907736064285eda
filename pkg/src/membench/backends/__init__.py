"""Kernel backend selection.

The hot inner loops (pulse trains, write cycling) exist twice: a compiled
Cython core (``_fastcore``) and a pure-Python reference
(:mod:`membench.backends.reference`).  Both consume pre-drawn normal arrays
and perform the same libm arithmetic in the same order, so their outputs are
bit-identical; ``tests/test_backends.py`` enforces that.

Selection happens at import: the compiled core when present, otherwise the
reference.  ``MEMBENCH_BACKEND=python|cython`` forces a choice (``cython``
raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import reference

_requested = os.environ.get("MEMBENCH_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "cython"):
    raise ImportError(
        f"MEMBENCH_BACKEND must be auto, python, or cython (got {_requested!r})"
    )

_compiled = None
if _requested in ("auto", "cython"):
    try:
        from . import _fastcore as _compiled  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "MEMBENCH_BACKEND=cython but membench.backends._fastcore is not built; "
                "reinstall with the Cython extension or unset the variable"
            ) from None

if _requested == "python":
    _compiled = None

_active = _compiled if _compiled is not None else reference
ACTIVE_BACKEND_NAME = "cython" if _compiled is not None else "python"


def active_backend():
    """Module-like namespace exposing the kernel functions."""
    return _active


def available_backends() -> dict[str, object]:
    out: dict[str, object] = {"python": reference}
    try:
        from . import _fastcore

        out["cython"] = _fastcore
    except ImportError:
        pass
    return out
