"""
Model file parsing and generation.

A model file is a JSON document declaring one statistics species. Every
rational is written either as a JSON integer or as a "p/q" string; floats are
rejected so that no rounding ever enters a certificate. Errors carry the JSON
path of the offending field.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import ModelFileError, ModelValidationError
from .exactla import (
    RationalMatrix,
    Subspace,
    format_rational,
    image,
    is_projector,
    kron,
)
from .fock import TENSOR_NAMES, ExchangeData
from .statmodel import StatModel, decompose_relations, preset

SCHEMA_VERSION = 1

logger = logging.getLogger(__name__)

# Standard exchange scalars shipped with the boson and fermion presets.
STANDARD_EXCHANGE = {
    "boson": {"A": "0", "B": "1", "C": "1", "S": "1", "R": "1"},
    "fermion": {"A": "1", "B": "0", "C": "-1", "S": "-1", "R": "-1"},
}


@dataclass
class ModelFile:
    """Parsed model file."""

    schema_version: int
    model: StatModel
    exchange: Optional[ExchangeData] = None
    max_ambient_dim: Optional[int] = None
    source: Optional[str] = None
    document: Optional[Dict[str, Any]] = None


def _rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ModelFileError("rationals must be integers or \"p/q\" strings, not floats", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ModelFileError(f"cannot parse {value!r} as a rational \"p/q\"", path)
    raise ModelFileError(f"expected a rational, got {type(value).__name__}", path)


def _rational_list(values: Any, path: str) -> List[Fraction]:
    if not isinstance(values, list):
        raise ModelFileError("expected a list of rationals", path)
    return [_rational(x, f"{path}[{i}]") for i, x in enumerate(values)]


def _square_matrix(values: Any, size: int, path: str) -> RationalMatrix:
    """Row-major flat list, or a list of rows."""
    if isinstance(values, list) and values and all(isinstance(r, list) for r in values):
        flat: List[Fraction] = []
        for i, row in enumerate(values):
            flat.extend(_rational_list(row, f"{path}[{i}]"))
    else:
        flat = _rational_list(values, path)
    if len(flat) != size * size:
        raise ModelFileError(f"expected {size * size} entries for a {size}x{size} matrix, got {len(flat)}", path)
    return RationalMatrix.from_flat(size, size, flat)


def _require(data: Dict[str, Any], key: str, path: str) -> Any:
    if key not in data:
        raise ModelFileError(f"missing required field {key!r}", path)
    return data[key]


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelFileError("expected an integer", path)
    return value


def _internal_space(spec: Any, k_dim: int, gram: RationalMatrix, path: str) -> Subspace:
    square = k_dim ** 2
    if not isinstance(spec, dict):
        raise ModelFileError("expected {\"vectors\": [...]} or {\"projector\": [...]}", path)
    if "vectors" in spec:
        vectors = spec["vectors"]
        if not isinstance(vectors, list):
            raise ModelFileError("expected a list of vectors", f"{path}.vectors")
        rows = []
        for i, v in enumerate(vectors):
            row = _rational_list(v, f"{path}.vectors[{i}]")
            if len(row) != square:
                raise ModelFileError(f"vector has {len(row)} entries, expected k_dim² = {square}",
                                     f"{path}.vectors[{i}]")
            rows.append(row)
        return Subspace.span(rows, square)
    if "projector" in spec:
        projector = _square_matrix(spec["projector"], square, f"{path}.projector")
        if not is_projector(projector, gram):
            raise ModelFileError("not a g-self-adjoint idempotent", f"{path}.projector")
        return image(projector)
    raise ModelFileError("expected a \"vectors\" or \"projector\" entry", path)


def _order(spec: Any, h_dim: int, path: str) -> Tuple[int, ...]:
    if spec is None or spec == "lex":
        return ()
    if not isinstance(spec, list) or sorted(spec) != list(range(h_dim)):
        raise ModelFileError(f"expected \"lex\" or a permutation of 0..{h_dim - 1}", path)
    return tuple(int(x) for x in spec)


def parse_model_document(data: Any, source: Optional[str] = None) -> ModelFile:
    """Build a ModelFile from an already decoded JSON document."""
    if not isinstance(data, dict):
        raise ModelFileError("top level must be an object")
    version = _integer(_require(data, "schema_version", "$"), "$.schema_version")
    if version != SCHEMA_VERSION:
        raise ModelFileError(f"unsupported schema version {version}", "$.schema_version")
    spec = _require(data, "model", "$")
    if not isinstance(spec, dict):
        raise ModelFileError("expected an object", "$.model")

    d = _integer(_require(spec, "d", "$.model"), "$.model.d")
    k_dim = _integer(_require(spec, "k_dim", "$.model"), "$.model.k_dim")
    if d < 1 or k_dim < 1:
        raise ModelFileError("d and k_dim must be positive", "$.model")
    g = _square_matrix(_require(spec, "g", "$.model"), k_dim, "$.model.g")
    gram = kron(g, g)
    name = str(data.get("name", spec.get("name", Path(source).stem if source else "model")))

    if "relations" in spec:
        relations = spec["relations"]
        D = d * k_dim
        vectors = relations.get("vectors") if isinstance(relations, dict) else None
        if not isinstance(vectors, list):
            raise ModelFileError("expected {\"vectors\": [...]}", "$.model.relations")
        rows = []
        for i, v in enumerate(vectors):
            row = _rational_list(v, f"$.model.relations.vectors[{i}]")
            if len(row) != D * D:
                raise ModelFileError(f"vector has {len(row)} entries, expected {D * D}",
                                     f"$.model.relations.vectors[{i}]")
            rows.append(row)
        w_sym, w_ext = decompose_relations(Subspace.span(rows, D * D), d, k_dim)
    else:
        w_sym = _internal_space(_require(spec, "w_sym", "$.model"), k_dim, gram, "$.model.w_sym")
        w_ext = _internal_space(_require(spec, "w_ext", "$.model"), k_dim, gram, "$.model.w_ext")

    n_max = _integer(spec.get("n_max", 4), "$.model.n_max")
    order = _order(spec.get("order", "lex"), d * k_dim, "$.model.order")
    model = StatModel(d=d, k_dim=k_dim, g=g, w_sym=w_sym, w_ext=w_ext,
                      order=order, n_max=n_max, name=name)

    exchange = None
    if data.get("exchange") is not None:
        exchange = _exchange(data["exchange"], k_dim)

    guard = None
    guards = data.get("guards")
    if guards is not None:
        if not isinstance(guards, dict):
            raise ModelFileError("expected an object", "$.guards")
        if "max_ambient_dim" in guards:
            guard = _integer(guards["max_ambient_dim"], "$.guards.max_ambient_dim")

    return ModelFile(schema_version=version, model=model, exchange=exchange,
                     max_ambient_dim=guard, source=source, document=data)


def _exchange(spec: Any, k_dim: int) -> ExchangeData:
    if not isinstance(spec, dict):
        raise ModelFileError("expected an object", "$.exchange")
    tensors: Dict[str, Any] = {}
    for key, value in spec.items():
        path = f"$.exchange.{key}"
        if key not in TENSOR_NAMES:
            raise ModelFileError(f"unknown tensor; expected one of {', '.join(TENSOR_NAMES)}", path)
        tensors[key] = _rational_list(value, path) if isinstance(value, list) else _rational(value, path)
    try:
        return ExchangeData.from_inputs(k_dim, **tensors)
    except ModelValidationError as e:
        raise ModelFileError(str(e), "$.exchange")


def load_model_file(path: Path) -> ModelFile:
    """Read and parse a model file."""
    logger.debug(f"Reading model file {path}")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFileError(f"cannot read file: {e.strerror}", str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    return parse_model_document(data, str(path))


def _vectors(space: Subspace) -> Dict[str, Any]:
    return {"vectors": [[format_rational(x) for x in v] for v in space.vectors()]}


def model_document(model: StatModel, exchange: Optional[Dict[str, Any]] = None,
                   max_ambient_dim: Optional[int] = None) -> Dict[str, Any]:
    """Canonical JSON document for a model (the report echo and preset files)."""
    lex = model.order == tuple(range(model.h_dim))
    document: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": model.name,
        "model": {
            "d": model.d,
            "k_dim": model.k_dim,
            "g": [format_rational(x) for x in model.g.flat()],
            "w_sym": _vectors(model.w_sym),
            "w_ext": _vectors(model.w_ext),
            "order": "lex" if lex else list(model.order),
            "n_max": model.n_max,
        },
    }
    if exchange:
        document["exchange"] = exchange
    if max_ambient_dim is not None:
        document["guards"] = {"max_ambient_dim": max_ambient_dim}
    return document


def preset_document(name: str, d: Optional[int] = None) -> Dict[str, Any]:
    """Model file contents for a built-in preset."""
    model = preset(name, d)
    return model_document(model, STANDARD_EXCHANGE.get(name))


def exchange_to_document(exchange: Optional[ExchangeData]) -> Optional[Dict[str, Any]]:
    return exchange.to_dict() if exchange is not None else None


def write_model_file(document: Dict[str, Any], path: Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Model file written to: {path}")


def preset_filename(name: str, d: int) -> str:
    return f"{name}.d{d}.json"


def default_preset_set() -> Sequence[Tuple[str, int]]:
    """The model files shipped in presets/."""
    return [("boson", 1), ("boson", 2), ("boson", 3),
            ("fermion", 1), ("fermion", 2), ("fermion", 3),
            ("singlet_pair", 1), ("singlet_pair", 2), ("singlet_pair_completed", 2)]
