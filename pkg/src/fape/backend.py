"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the
pure-Python twin takes over transparently.  ``FAPE_BACKEND=python`` forces
the fallback (useful for benchmarking the two against each other) and
``FAPE_BACKEND=c`` makes a missing extension a hard error.
"""

import os


def get_kernels(name=None):
    """Kernel module for an explicit backend name, or the default choice."""
    if name in (None, "auto"):
        return _KERNELS
    if name in ("c", "compiled"):
        from . import _kernels

        return _kernels
    if name in ("python", "pure"):
        from . import _kernels_py

        return _kernels_py
    raise ValueError(f"unknown backend {name!r}; expected auto, c or python")


def _select():
    choice = os.environ.get("FAPE_BACKEND", "auto").strip().lower() or "auto"
    if choice in ("auto", "c", "compiled"):
        try:
            from . import _kernels

            return _kernels, "c"
        except ImportError:
            if choice != "auto":
                raise ImportError(
                    "FAPE_BACKEND requested the compiled kernels, "
                    "but the extension is not built"
                ) from None
    elif choice not in ("python", "pure"):
        raise ValueError(f"unknown FAPE_BACKEND value {choice!r}")
    from . import _kernels_py

    return _kernels_py, "python"


_KERNELS, BACKEND = _select()
