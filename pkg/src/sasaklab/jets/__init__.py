"""Jet arithmetic with a compiled fast path.

The hot kernels (nested dual numbers and second-order jets) exist twice:
a Cython extension (``_jets_cy``) and a pure-Python reference
(``_jets_py``).  The compiled backend is selected at import when
available; set ``SASAKLAB_JETS=python`` to force the fallback or
``SASAKLAB_JETS=compiled`` to require the extension.
"""

import os

_choice = os.environ.get("SASAKLAB_JETS", "auto").strip().lower()

if _choice in ("auto", "", "compiled", "cy", "c"):
    try:
        from ._jets_cy import (  # type: ignore[attr-defined]
            BACKEND,
            Dual,
            Jet2,
            d_scalar,
            d_vector,
            enter_level,
            exit_level,
            imag,
            jsqrt,
            value,
        )
    except ImportError:
        if _choice not in ("auto", ""):
            raise
        from ._jets_py import (
            BACKEND,
            Dual,
            Jet2,
            d_scalar,
            d_vector,
            enter_level,
            exit_level,
            imag,
            jsqrt,
            value,
        )
elif _choice in ("python", "py", "pure"):
    from ._jets_py import (
        BACKEND,
        Dual,
        Jet2,
        d_scalar,
        d_vector,
        enter_level,
        exit_level,
        imag,
        jsqrt,
        value,
    )
else:
    raise RuntimeError(f"unknown SASAKLAB_JETS backend {_choice!r}")

__all__ = [
    "BACKEND",
    "Dual",
    "Jet2",
    "d_scalar",
    "d_vector",
    "enter_level",
    "exit_level",
    "imag",
    "jsqrt",
    "value",
]
