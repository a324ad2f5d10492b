"""JSON and JSON-lines codec for polynomials, parameters, roots and corpora.

Complex numbers travel as [re, im]; floats are written with 17 significant
digits so every double round-trips exactly and identical inputs give
byte-identical output.
"""

import json
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Tuple

from corpus_bench import Instance, family_for
from numeric_core import InvalidInputError, MonicPoly, NumericalFailureError, RootSet


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise NumericalFailureError(f"cannot serialize non-finite number {x!r}")
    # + 0.0 folds -0.0 into 0.0
    return format(float(x) + 0.0, ".17g")


def encode(obj: Any) -> str:
    """Deterministic single-line JSON text; complex values become [re, im]."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, complex):
        return f"[{format_float(obj.real)}, {format_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k), ensure_ascii=False)}: {encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(encode(v) for v in obj) + "]"
    # numpy scalars and the like
    if hasattr(obj, "item"):
        return encode(obj.item())
    raise InvalidInputError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Any) -> str:
    return encode(doc) + "\n"


def _reject_constant(name: str):
    raise InvalidInputError(f"non-finite JSON number {name} is not accepted")


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except ValueError as e:
        raise InvalidInputError(f"malformed JSON: {e}") from e


def read_text(path: str, stdin_text: Optional[str] = None) -> str:
    """Contents of ``path``; '-' reads the supplied stdin text."""
    if path == "-":
        if stdin_text is None:
            raise InvalidInputError("no input on stdin")
        return stdin_text
    if not os.path.isfile(path):
        raise InvalidInputError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def parse_complex(value: Any, name: str = "value") -> complex:
    """[re, im] (or a bare real number) to complex."""
    if isinstance(value, bool):
        raise InvalidInputError(f"{name}: expected [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        parts = [value, 0.0]
    elif isinstance(value, list) and len(value) == 2:
        parts = value
    else:
        raise InvalidInputError(f"{name}: expected [re, im], got {value!r}")
    floats = []
    for part in parts:
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise InvalidInputError(f"{name}: components must be numbers, got {value!r}")
        try:
            part = float(part)
        except OverflowError as e:
            raise InvalidInputError(f"{name}: component out of float range") from e
        if not math.isfinite(part):
            raise InvalidInputError(f"{name}: components must be finite, got {value!r}")
        floats.append(part)
    return complex(floats[0], floats[1])


def _require_object(doc: Any, what: str) -> Dict[str, Any]:
    if not isinstance(doc, dict):
        raise InvalidInputError(f"{what} must be a JSON object")
    return doc


def _degree_of(doc: Dict[str, Any], expected: Optional[int]) -> int:
    degree = doc.get("degree", expected)
    if isinstance(degree, bool) or not isinstance(degree, int):
        raise InvalidInputError(f"degree must be an integer, got {degree!r}")
    if expected is not None and degree != expected:
        raise InvalidInputError(f"document has degree {degree}, expected {expected}")
    return degree


def poly_to_json(p: MonicPoly) -> Dict[str, Any]:
    return {"degree": p.degree, "coeffs": list(p.coeffs)}


def poly_from_json(doc: Any, expected_degree: Optional[int] = None) -> MonicPoly:
    doc = _require_object(doc, "polynomial")
    degree = _degree_of(doc, expected_degree)
    coeffs = doc.get("coeffs")
    if not isinstance(coeffs, list):
        raise InvalidInputError("polynomial needs a 'coeffs' array")
    if len(coeffs) != degree:
        raise InvalidInputError(f"'coeffs' has {len(coeffs)} entries, degree is {degree}")
    return MonicPoly(degree, tuple(parse_complex(c, f"c{m}") for m, c in enumerate(coeffs)))


def params_to_json(params: Any) -> Dict[str, Any]:
    degree = 8 if "gamma0" in params.as_dict() else 9
    return {"degree": degree, "params": params.as_dict()}


def params_from_json(doc: Any, expected_degree: Optional[int] = None):
    doc = _require_object(doc, "parameter document")
    family = family_for(_degree_of(doc, expected_degree))
    values = _require_object(doc.get("params"), "'params'")
    if set(values) != set(family.param_names):
        raise InvalidInputError(
            f"'params' needs exactly the keys {', '.join(family.param_names)}; "
            f"got {', '.join(sorted(values))}"
        )
    return family.param_cls(**{n: parse_complex(values[n], n) for n in family.param_names})


def roots_from_json(value: Any) -> Tuple[complex, ...]:
    if not isinstance(value, list):
        raise InvalidInputError("'roots' must be an array of [re, im] pairs")
    return tuple(parse_complex(r, f"root {k}") for k, r in enumerate(value))


def rootset_to_json(roots: RootSet) -> List[complex]:
    return list(roots.roots)


def trace_to_json(trace: Any) -> Dict[str, Any]:
    if hasattr(trace, "x"):
        return {"x": trace.x, "y": trace.y, "z": trace.z}
    return {"y": trace.y, "z": trace.z}


def diagnosis_to_json(diag: Any) -> Dict[str, Any]:
    gauge = {"alpha0": diag.gauge_alpha0}
    if hasattr(diag, "gauge_beta0"):
        gauge["beta0"] = diag.gauge_beta0
    return {
        "in_family": diag.in_family,
        "residuals": list(diag.constraint_residuals),
        "round_trip_error": diag.round_trip_error,
        "recovered": diag.recovered.as_dict() if diag.recovered is not None else None,
        "gauge": gauge,
    }


def instance_to_json(instance: Instance) -> Dict[str, Any]:
    return {
        "index": instance.index,
        "degree": instance.poly.degree,
        "params": instance.params.as_dict(),
        "params_valid": instance.params_valid,
        "coeffs": list(instance.poly.coeffs),
    }


def dump_corpus(instances: Iterable[Instance]) -> str:
    """One JSON object per line, in the given order."""
    return "".join(dumps(instance_to_json(inst)) for inst in instances)


def load_corpus(text: str) -> List[Instance]:
    instances = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = _require_object(loads(line), "corpus line")
            degree = _degree_of(doc, None)
            params = params_from_json({"degree": degree, "params": doc.get("params")})
            poly = poly_from_json({"degree": degree, "coeffs": doc.get("coeffs")})
            index = doc.get("index", lineno - 1)
            valid = doc.get("params_valid", True)
            if not isinstance(valid, bool):
                raise InvalidInputError("'params_valid' must be a boolean")
        except InvalidInputError as e:
            raise InvalidInputError(f"corpus line {lineno}: {e}") from e
        instances.append(Instance(index, params, poly, valid))
    return instances

