"""Interactive configuration over compiled decision diagrams.

Compile a constraint model (or a plain solution catalogue) once into a
layered decision diagram, then answer interactive queries online: which
values remain choosable, under which additive cost budgets, with the
guarantee that choosing any offered value never leads to a dead end.
"""

__version__ = "0.1.0"

from .artifact import (
    Artifact,
    CompileStats,
    compile_catalogue_doc,
    compile_model,
    load_artifact,
    save_artifact,
)
from .errors import LimitExceeded, ModelError, QueryError
from .model import CspModel, parse_catalogue, parse_model, serialize_model
from .session import Session

__all__ = [
    "Artifact",
    "CompileStats",
    "CspModel",
    "LimitExceeded",
    "ModelError",
    "QueryError",
    "Session",
    "__version__",
    "compile_catalogue_doc",
    "compile_model",
    "load_artifact",
    "parse_catalogue",
    "parse_model",
    "save_artifact",
    "serialize_model",
]
