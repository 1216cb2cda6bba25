"""Validated records produced by the three extraction stages.

Every record that leaves the orchestrator has been checked against the
stage's response schema; the parse_* functions raise SchemaViolation with a
field-level message suitable for corrective retry prompts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

HTTP_METHODS = ("GET", "POST", "PUT", "DELETE", "PATCH", "HEAD", "OPTIONS")

PARAMETER_TYPES = ("string", "number", "integer", "object", "array", "boolean")

PARAMETER_POSITIONS = ("query", "path", "header", "cookie", "body")

# Models frequently answer with language-flavored type names; fold them onto
# the closed vocabulary instead of rejecting the reply.
_TYPE_ALIASES = {
    "str": "string",
    "text": "string",
    "int": "integer",
    "long": "integer",
    "short": "integer",
    "float": "number",
    "double": "number",
    "decimal": "number",
    "bool": "boolean",
    "dict": "object",
    "map": "object",
    "list": "array",
    "collection": "array",
}


class SchemaViolation(ValueError):
    """A stage reply failed schema validation; message names the offending field."""


class ConstraintContradiction(SchemaViolation):
    """Bounds arrived inverted (min above max); retriable, then droppable."""

    def __init__(self, message: str, record: dict | None = None):
        super().__init__(message)
        self.record = record


def _require(obj: dict, key: str, context: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaViolation(f"{context}: expected a JSON object, got {type(obj).__name__}")
    if key not in obj or obj[key] is None:
        raise SchemaViolation(f"{context}: missing required field {key!r}")
    return obj[key]


def normalize_type(value: Any, context: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise SchemaViolation(f"{context}: 'type' must be a non-empty string")
    name = value.strip().lower()
    name = _TYPE_ALIASES.get(name, name)
    if name not in PARAMETER_TYPES:
        raise SchemaViolation(
            f"{context}: type {value!r} not in {{{', '.join(PARAMETER_TYPES)}}}"
        )
    return name


def normalize_bool(value: Any, context: str) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise SchemaViolation(f"{context}: expected boolean or 'true'/'false', got {value!r}")


@dataclass(frozen=True)
class EndpointMethod:
    """One API operation: URL path template, HTTP method, handler name."""

    endpoint_path: str
    http_method: str
    method_name: str

    def key(self) -> tuple[str, str]:
        return (self.endpoint_path, self.http_method)


def parse_endpoint_method(obj: Any, context: str = "endpoint") -> EndpointMethod:
    path = _require(obj, "endpoint_path", context)
    method = _require(obj, "http_method", context)
    name = _require(obj, "method_name", context)
    if not isinstance(path, str) or not path.strip():
        raise SchemaViolation(f"{context}: 'endpoint_path' must be a non-empty string")
    if not isinstance(method, str):
        raise SchemaViolation(f"{context}: 'http_method' must be a string")
    method = method.strip().upper()
    if method not in HTTP_METHODS:
        raise SchemaViolation(f"{context}: http_method {method!r} not in {{{', '.join(HTTP_METHODS)}}}")
    path = path.strip()
    if not path.startswith("/"):
        path = "/" + path
    return EndpointMethod(endpoint_path=path, http_method=method, method_name=str(name).strip())


@dataclass(frozen=True)
class ConstraintSet:
    """Value restrictions on a parameter, collected in the constraints stage."""

    min_length: int | None = None
    max_length: int | None = None
    enum: tuple[str, ...] | None = None
    format: str | None = None
    min: float | None = None
    max: float | None = None
    default_value: Any = None

    def is_empty(self) -> bool:
        return all(
            getattr(self, f) is None
            for f in ("min_length", "max_length", "enum", "format", "min", "max", "default_value")
        )


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    type: str
    required: bool
    position: str
    description: str = ""
    constraints: ConstraintSet | None = None

    def with_constraints(self, constraints: ConstraintSet) -> "ParameterSpec":
        return replace(self, constraints=constraints)


def parse_parameter(obj: Any, context: str = "parameter") -> ParameterSpec:
    name = _require(obj, "name", context)
    type_name = normalize_type(_require(obj, "type", context), f"{context} {name!r}")
    required = normalize_bool(obj.get("require", obj.get("required", False)), f"{context} {name!r}")
    position = str(_require(obj, "position", context)).strip().lower()
    if position not in PARAMETER_POSITIONS:
        raise SchemaViolation(
            f"{context} {name!r}: position {position!r} not in {{{', '.join(PARAMETER_POSITIONS)}}}"
        )
    if position == "path":
        required = True  # path parameters are always required
    description = obj.get("description") or ""
    return ParameterSpec(
        name=str(name).strip(),
        type=type_name,
        required=required,
        position=position,
        description=str(description),
    )


@dataclass(frozen=True)
class ResponseSpec:
    status_code: int
    return_schema: Any = None
    exception: str | None = None
    description: str = ""


def parse_response(obj: Any, context: str = "response") -> ResponseSpec:
    code = _require(obj, "status_code", context)
    if isinstance(code, str) and code.strip().isdigit():
        code = int(code.strip())
    if not isinstance(code, int) or isinstance(code, bool) or not 100 <= code <= 599:
        raise SchemaViolation(f"{context}: status_code {code!r} must be an integer in 100..599")
    exception = obj.get("exception")
    if exception is not None and not isinstance(exception, str):
        raise SchemaViolation(f"{context}: 'exception' must be a string when present")
    return ResponseSpec(
        status_code=code,
        return_schema=obj.get("return_schema"),
        exception=exception or None,
        description=str(obj.get("description") or ""),
    )


def _coerce_int(value: Any, context: str) -> int:
    if isinstance(value, bool):
        raise SchemaViolation(f"{context}: expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        return int(value.strip())
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise SchemaViolation(f"{context}: expected an integer, got {value!r}")


def _coerce_number(value: Any, context: str) -> float:
    if isinstance(value, bool):
        raise SchemaViolation(f"{context}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            pass
    raise SchemaViolation(f"{context}: expected a number, got {value!r}")


def parse_constraints(obj: Any, context: str = "constraints") -> ConstraintSet:
    """Validate one constraints-stage record into a ConstraintSet.

    Length bounds arrive as strings in typical replies and are coerced;
    enums are deduplicated preserving order. Contradictory bounds raise so
    the caller can retry with corrective feedback.
    """
    if not isinstance(obj, dict):
        raise SchemaViolation(f"{context}: expected a JSON object, got {type(obj).__name__}")
    min_length = _coerce_int(obj["min_length"], f"{context}.min_length") if obj.get("min_length") is not None else None
    max_length = _coerce_int(obj["max_length"], f"{context}.max_length") if obj.get("max_length") is not None else None
    if min_length is not None and min_length < 0:
        raise SchemaViolation(f"{context}.min_length: must be nonnegative")
    if max_length is not None and max_length < 0:
        raise SchemaViolation(f"{context}.max_length: must be nonnegative")
    if min_length is not None and max_length is not None and min_length > max_length:
        raise ConstraintContradiction(
            f"{context}: min_length {min_length} exceeds max_length {max_length}", obj
        )

    enum = obj.get("enum")
    if enum is not None:
        if not isinstance(enum, list) or not enum:
            raise SchemaViolation(f"{context}.enum: must be a non-empty list when present")
        deduped: list[str] = []
        for item in enum:
            item = str(item)
            if item not in deduped:
                deduped.append(item)
        enum = tuple(deduped)

    fmt = obj.get("format")
    if fmt is not None and not isinstance(fmt, str):
        raise SchemaViolation(f"{context}.format: must be a string when present")

    minimum = _coerce_number(obj["min"], f"{context}.min") if obj.get("min") is not None else None
    maximum = _coerce_number(obj["max"], f"{context}.max") if obj.get("max") is not None else None
    if minimum is not None and maximum is not None and minimum > maximum:
        raise ConstraintContradiction(f"{context}: min {minimum} exceeds max {maximum}", obj)

    return ConstraintSet(
        min_length=min_length,
        max_length=max_length,
        enum=enum,
        format=fmt,
        min=minimum,
        max=maximum,
        default_value=obj.get("default_value"),
    )


@dataclass(frozen=True)
class ProviderConfig:
    """Connection settings for an OpenAI-compatible chat-completions provider."""

    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4o-mini"
    temperature: float = 0.2
    context_window: int = 128_000
    max_retries: int = 3
    api_key_env: str = "LRASGEN_API_KEY"

    def __post_init__(self):
        if self.context_window <= 0:
            raise ValueError("context_window must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be nonnegative")


@dataclass
class EndpointExtraction:
    """Everything extracted for one endpoint, ready for document assembly."""

    endpoint: EndpointMethod
    parameters: list[ParameterSpec] = field(default_factory=list)
    responses: list[ResponseSpec] = field(default_factory=list)
