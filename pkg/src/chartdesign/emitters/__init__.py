"""Chart emitters: one design spec + data table in, renderer artifacts out."""

from .common import Backend, EmitContext, EmitError, EmitResult, build_context
from .scripts import emit_script
from .vegalite import design_attrs_from_vegalite, emit_vegalite

#: Conventional file extension per backend.
EXTENSIONS = {
    Backend.VEGALITE: ".vl.json",
    Backend.MATPLOTLIB: ".py",
    Backend.GGPLOT2: ".R",
    Backend.ALTAIR: ".py",
}


def emit(spec, table, backend: Backend | str) -> EmitResult:
    """Compile (spec, table) for any backend."""
    backend = Backend(backend)
    if backend is Backend.VEGALITE:
        return emit_vegalite(spec, table)
    return emit_script(spec, table, backend)


__all__ = [
    "Backend",
    "EmitContext",
    "EmitError",
    "EmitResult",
    "EXTENSIONS",
    "build_context",
    "design_attrs_from_vegalite",
    "emit",
    "emit_script",
    "emit_vegalite",
]
