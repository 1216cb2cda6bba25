"""Fold extracted endpoint data into an OpenAPI 3.1.1 document.

Constraint fields map onto JSON-Schema keywords through a fixed table
(CONSTRAINT_KEYWORDS); body-position parameters become the operation's
requestBody; user-defined return types are lifted into components/schemas
and referenced by $ref. Serialization is canonical, so identical inputs
always produce byte-identical documents.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from http import HTTPStatus
from typing import Any

from .diagnostics import DiagnosticSink
from .orchestrator.records import (
    ConstraintSet,
    EndpointExtraction,
    ParameterSpec,
    ResponseSpec,
)

OPENAPI_VERSION = "3.1.1"

# Emission order for methods under one path; path keys themselves sort
# lexicographically.
METHOD_ORDER = ("get", "post", "put", "patch", "delete", "head", "options")

# ConstraintSet field -> JSON-Schema keyword. The inverse mapping drives
# entity extraction in the evaluator, so this table is the single source of
# truth for constraint fidelity.
CONSTRAINT_KEYWORDS = {
    "min_length": "minLength",
    "max_length": "maxLength",
    "enum": "enum",
    "format": "format",
    "min": "minimum",
    "max": "maximum",
    "default_value": "default",
}

# Separates the descriptions of merged same-status response variants; the
# evaluator splits on it to recover the variant count.
VARIANT_SEPARATOR = " | "

_TYPE_NAME = re.compile(r"^[A-Z][A-Za-z0-9_]*$")
_WRAPPED_TYPE_NAME = re.compile(r"^(?:List|Collection|Set|Iterable|Array)<([A-Z][A-Za-z0-9_]*)>$")


class AssemblyError(ValueError):
    """The extracted data cannot form a valid document."""


class DuplicateEndpoint(AssemblyError):
    """The same (path, method) pair arrived twice; upstream dedup failed."""


@dataclass
class OasDocument:
    """An OpenAPI 3.1.1 tree, serializable to canonical JSON."""

    openapi: str = OPENAPI_VERSION
    info: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    components: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {"openapi": self.openapi, "info": self.info, "paths": self.paths}
        if self.components:
            doc["components"] = self.components
        return doc

    @classmethod
    def from_dict(cls, data: dict) -> "OasDocument":
        return cls(
            openapi=data.get("openapi", OPENAPI_VERSION),
            info=data.get("info", {}),
            paths=data.get("paths", {}),
            components=data.get("components", {}),
        )


def constraint_to_schema(param: ParameterSpec) -> dict:
    """JSON-Schema object for one parameter: type plus its constraint keywords.

    The mapping is exactly CONSTRAINT_KEYWORDS; ``required`` is a property
    of the parameter object, never of the schema.
    """
    schema: dict[str, Any] = {"type": param.type}
    constraints = param.constraints or ConstraintSet()
    for field_name, keyword in CONSTRAINT_KEYWORDS.items():
        value = getattr(constraints, field_name)
        if value is None:
            continue
        if field_name == "enum":
            schema[keyword] = list(value)
        elif field_name in ("min", "max"):
            schema[keyword] = int(value) if float(value).is_integer() else value
        else:
            schema[keyword] = value
    return schema


def _infer_schema(value: Any) -> dict:
    """Structural schema inferred from an example instance's shape."""
    if isinstance(value, bool):
        return {"type": "boolean"}
    if isinstance(value, int):
        return {"type": "integer"}
    if isinstance(value, float):
        return {"type": "number"}
    if isinstance(value, str):
        return {"type": "string"}
    if isinstance(value, list):
        if value:
            return {"type": "array", "items": _infer_schema(value[0])}
        return {"type": "array"}
    if isinstance(value, dict):
        return {
            "type": "object",
            "properties": {key: _infer_schema(val) for key, val in value.items()},
        }
    return {}


class _ComponentStore:
    """Named schemas for user-defined types, with collision renaming."""

    def __init__(self, diagnostics: DiagnosticSink):
        self.schemas: dict[str, dict] = {}
        self._diagnostics = diagnostics

    def add(self, name: str, schema: dict) -> str:
        existing = self.schemas.get(name)
        if existing is None:
            self.schemas[name] = schema
            return name
        if existing == schema:
            return name
        suffix = 2
        while f"{name}{suffix}" in self.schemas and self.schemas[f"{name}{suffix}"] != schema:
            suffix += 1
        renamed = f"{name}{suffix}"
        if renamed not in self.schemas:
            self._diagnostics.add(
                "component-collision", f"schema name {name!r} already taken; using {renamed!r}"
            )
            self.schemas[renamed] = schema
        return renamed


def _return_schema(value: Any, components: _ComponentStore) -> dict | None:
    """Response content schema; lifts named user-defined types into components."""
    if value is None:
        return None
    if isinstance(value, str):
        name = value.strip()
        wrapped = _WRAPPED_TYPE_NAME.match(name)
        if wrapped:
            inner = components.add(wrapped.group(1), {"type": "object"})
            return {"type": "array", "items": {"$ref": f"#/components/schemas/{inner}"}}
        if _TYPE_NAME.match(name):
            added = components.add(name, {"type": "object"})
            return {"$ref": f"#/components/schemas/{added}"}
        return {"type": "string", "examples": [value]}
    schema = _infer_schema(value)
    schema["examples"] = [value]
    return schema


def _response_description(spec: ResponseSpec) -> str:
    if spec.description:
        return spec.description
    if spec.exception:
        return f"Exception: {spec.exception}"
    try:
        return HTTPStatus(spec.status_code).phrase
    except ValueError:
        return f"Status {spec.status_code}"


def _build_responses(responses: list[ResponseSpec], components: _ComponentStore) -> dict:
    """Responses object; same-status variants merge into one entry.

    The merged description joins each variant's description with
    VARIANT_SEPARATOR so no variant is lost; the first variant providing a
    body schema supplies the content.
    """
    by_code: dict[int, list[ResponseSpec]] = {}
    for spec in responses:
        by_code.setdefault(spec.status_code, []).append(spec)

    built: dict[str, dict] = {}
    for code in sorted(by_code):
        variants = by_code[code]
        entry: dict[str, Any] = {
            "description": VARIANT_SEPARATOR.join(_response_description(v) for v in variants)
        }
        for variant in variants:
            schema = _return_schema(variant.return_schema, components)
            if schema is not None:
                entry["content"] = {"application/json": {"schema": schema}}
                break
        built[str(code)] = entry
    return built


def _build_parameters(params: list[ParameterSpec]) -> list[dict]:
    built = []
    for param in params:
        entry: dict[str, Any] = {"name": param.name, "in": param.position, "required": param.required}
        if param.description:
            entry["description"] = param.description
        entry["schema"] = constraint_to_schema(param)
        built.append(entry)
    return built


def _build_request_body(body_params: list[ParameterSpec]) -> dict:
    if len(body_params) == 1:
        param = body_params[0]
        schema = constraint_to_schema(param)
        body: dict[str, Any] = {
            "content": {"application/json": {"schema": schema}},
            "required": param.required,
        }
        if param.description:
            body["description"] = param.description
        return body
    properties = {}
    required_names = []
    for param in body_params:
        properties[param.name] = constraint_to_schema(param)
        if param.required:
            required_names.append(param.name)
    schema = {"type": "object", "properties": properties}
    if required_names:
        schema["required"] = required_names
    return {"content": {"application/json": {"schema": schema}}, "required": bool(required_names)}


def assemble(
    endpoints: list[EndpointExtraction],
    info: dict | None = None,
    diagnostics: DiagnosticSink | None = None,
) -> OasDocument:
    """Build the document from per-endpoint extraction results.

    Raises DuplicateEndpoint when the same (path, method) arrives twice and
    AssemblyError when an operation would end up without responses.
    """
    diagnostics = diagnostics if diagnostics is not None else DiagnosticSink()
    components = _ComponentStore(diagnostics)
    info = {
        "title": (info or {}).get("title", "Generated API"),
        "version": (info or {}).get("version", "1.0.0"),
        "description": (info or {}).get(
            "description", "Specification generated from source code."
        ),
    }

    paths: dict[str, dict[str, dict]] = {}
    seen: set[tuple[str, str]] = set()
    for extraction in endpoints:
        ep = extraction.endpoint
        method = ep.http_method.lower()
        if (ep.endpoint_path, method) in seen:
            raise DuplicateEndpoint(f"{ep.http_method} {ep.endpoint_path} assembled twice")
        seen.add((ep.endpoint_path, method))
        if not extraction.responses:
            raise AssemblyError(
                f"{ep.http_method} {ep.endpoint_path}: an operation needs at least one response"
            )

        operation: dict[str, Any] = {
            "summary": ep.method_name.removesuffix("()") or f"{ep.http_method} {ep.endpoint_path}",
            "operationId": ep.method_name.removesuffix("()"),
        }
        body_params = [p for p in extraction.parameters if p.position == "body"]
        plain_params = [p for p in extraction.parameters if p.position != "body"]
        if plain_params:
            operation["parameters"] = _build_parameters(plain_params)
        if body_params:
            operation["requestBody"] = _build_request_body(body_params)
        operation["responses"] = _build_responses(extraction.responses, components)

        paths.setdefault(ep.endpoint_path, {})[method] = operation

    ordered_paths = {
        path: {m: paths[path][m] for m in METHOD_ORDER if m in paths[path]}
        for path in sorted(paths)
    }
    document = OasDocument(
        openapi=OPENAPI_VERSION,
        info=info,
        paths=ordered_paths,
        components={"schemas": dict(sorted(components.schemas.items()))} if components.schemas else {},
    )

    from .oas31 import validate_document

    violations = validate_document(document.to_dict())
    if violations:
        raise AssemblyError("assembled document is invalid: " + "; ".join(violations[:5]))
    return document


def serialize(doc: OasDocument, *, yaml_format: bool = False) -> str:
    """Canonical text: 2-space-indent JSON (or YAML behind the flag), UTF-8.

    Paths are already ordered at assembly; serialization never reorders, so
    equal documents yield byte-identical output.
    """
    data = doc.to_dict()
    if yaml_format:
        import yaml

        return yaml.safe_dump(data, sort_keys=False, allow_unicode=True)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def deserialize(text: str) -> OasDocument:
    return OasDocument.from_dict(json.loads(text))
