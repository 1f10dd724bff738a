"""Backend selection for the batched information-term kernels.

The compiled ``_kernels`` extension is used when it is importable; otherwise
the numpy implementation in ``_pykernels`` is used. Setting the environment
variable ``RELAY_BOUNDS_PURE=1`` forces the numpy backend.
"""
import os
from contextlib import contextmanager

from . import _pykernels
from ._pykernels import (  # noqa: F401  (column indices)
    I_T_V,
    I_T_V_GIVEN_Y,
    I_V_Y,
    I_X_Y,
    I_X_Y_GIVEN_T,
    I_X_Y_GIVEN_V,
    I_XV_Y,
    RELAY_TERMS,
)

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("RELAY_BOUNDS_PURE", "") not in ("1", "true", "yes"):
    backend = _compiled
    BACKEND = "cython"
else:
    backend = _pykernels
    BACKEND = "python"

cutset_terms = backend.cutset_terms
relay_terms = backend.relay_terms
aux_terms = backend.aux_terms


def backends():
    """Available backends by name, compiled first when present."""
    out = {}
    if _compiled is not None:
        out["cython"] = _compiled
    out["python"] = _pykernels
    return out


@contextmanager
def use_backend(name: str):
    """Temporarily route this module's kernel functions to another backend."""
    global cutset_terms, relay_terms, aux_terms, BACKEND
    table = backends()
    if name not in table:
        raise ValueError(f"backend {name!r} is not available; have {', '.join(table)}")
    saved = cutset_terms, relay_terms, aux_terms, BACKEND
    mod = table[name]
    cutset_terms, relay_terms, aux_terms, BACKEND = (mod.cutset_terms, mod.relay_terms,
                                                     mod.aux_terms, name)
    try:
        yield mod
    finally:
        cutset_terms, relay_terms, aux_terms, BACKEND = saved
