"""The three staged interrogations: endpoints, parameters/responses, constraints.

Every stage renders its prompt, sends one chat request, extracts the JSON
payload, and validates it against the stage schema. An invalid reply is
retried with the assistant's reply and a corrective instruction appended to
the conversation (never mutating earlier messages), up to the provider's
max_retries; exhaustion raises SchemaViolation. Each request starts a fresh
conversation, so with a fixed temperature and the fixture provider the
whole pipeline is a pure function of the project tree.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from ..diagnostics import DiagnosticSink
from ..extractor import EndpointContext
from . import prompts
from .jsonio import NoJsonFound, extract_json
from .providers import ProviderError, send_chat
from .records import (
    ConstraintContradiction,
    ConstraintSet,
    EndpointExtraction,
    EndpointMethod,
    ParameterSpec,
    ResponseSpec,
    SchemaViolation,
    parse_constraints,
    parse_endpoint_method,
    parse_parameter,
    parse_response,
)

DEFAULT_MAX_IN_FLIGHT = 4


def _interrogate(provider, prompt: str, validate):
    """Send, validate, and retry with corrective feedback until valid."""
    messages = [("user", prompt)]
    max_retries = provider.config.max_retries
    last_error: SchemaViolation | None = None
    for _ in range(max_retries + 1):
        reply = send_chat(provider, messages)
        try:
            return validate(extract_json(reply))
        except (SchemaViolation, NoJsonFound) as exc:
            last_error = exc if isinstance(exc, SchemaViolation) else SchemaViolation(str(exc))
            messages = messages + [
                ("assistant", reply),
                ("user", prompts.corrective_instruction(str(exc))),
            ]
    raise last_error if last_error else SchemaViolation("no valid reply")


def _as_record_list(value) -> list:
    if isinstance(value, dict):
        return [value]
    if isinstance(value, list):
        return value
    raise SchemaViolation(f"expected a JSON array or object, got {type(value).__name__}")


def stage_a_endpoints(ctx: EndpointContext, provider) -> list[EndpointMethod]:
    """Identify the endpoint methods declared in one entry file.

    Only the entry file is submitted, plus the routing configuration file
    for configuration-based frameworks. Output is deduplicated by
    (path, method) and each record normalized (uppercase method, leading
    slash on the path).
    """
    code = prompts.bundle_code_lines(
        ctx.cleaned_entry, ctx.related_by_relpath(ctx.config_files)
    )

    def validate(value) -> list[EndpointMethod]:
        endpoints = []
        seen = set()
        for i, record in enumerate(_as_record_list(value)):
            ep = parse_endpoint_method(record, context=f"endpoint[{i}]")
            if ep.key() not in seen:
                seen.add(ep.key())
                endpoints.append(ep)
        return endpoints

    return _interrogate(provider, prompts.endpoints_prompt(code), validate)


def _select_record(records: list, key: str, wanted: str) -> dict:
    for record in records:
        if isinstance(record, dict) and record.get(key) == wanted:
            return record
    if not records:
        raise SchemaViolation("reply contains no records")
    first = records[0]
    if not isinstance(first, dict):
        raise SchemaViolation(f"expected a JSON object, got {type(first).__name__}")
    return first


def stage_b_params_responses(
    ctx: EndpointContext, ep: EndpointMethod, provider
) -> tuple[list[ParameterSpec], list[ResponseSpec]]:
    """Decompose one endpoint into its parameters and responses.

    The whole bundle (entry file plus related files) is submitted so that
    names referenced through project constants or user-defined types stay
    resolvable. The ``response`` field accepts a single object or an array
    and is normalized to a list.
    """
    code = prompts.bundle_code_lines(ctx.cleaned_entry, ctx.related_by_relpath())

    def matches(record) -> bool:
        if not isinstance(record, dict):
            return False
        if record.get("method_name") == ep.method_name:
            return True
        return (
            record.get("endpoint_path") == ep.endpoint_path
            and str(record.get("endpoint_method", "")).upper() == ep.http_method
        )

    def validate(value) -> tuple[list[ParameterSpec], list[ResponseSpec]]:
        records = _as_record_list(value)
        record = next((r for r in records if matches(r)), None)
        if record is None:
            record = _select_record(records, "method_name", ep.method_name)
        raw_params = record.get("parameters") or []
        if not isinstance(raw_params, list):
            raise SchemaViolation("'parameters' must be an array")
        parameters = [
            parse_parameter(p, context=f"parameter[{i}]") for i, p in enumerate(raw_params)
        ]
        raw_responses = record.get("response", record.get("responses"))
        if raw_responses is None:
            raw_responses = []
        if isinstance(raw_responses, dict):
            raw_responses = [raw_responses]
        if not isinstance(raw_responses, list):
            raise SchemaViolation("'response' must be an object or an array")
        responses = [
            parse_response(r, context=f"response[{i}]") for i, r in enumerate(raw_responses)
        ]
        return parameters, responses

    return _interrogate(
        provider, prompts.params_responses_prompt(code, ep.method_name), validate
    )


def stage_c_constraints(
    ctx: EndpointContext,
    ep: EndpointMethod,
    param: ParameterSpec,
    provider,
    diagnostics: DiagnosticSink | None = None,
) -> ConstraintSet:
    """Extract the value constraints of one parameter.

    Basic, user-defined, and mapping-backed parameters all go through the
    same prompt. Contradictory bounds are retried with corrective feedback;
    if the contradiction survives every retry the offending bounds are
    dropped with a diagnostic rather than failing the parameter.
    """
    code = prompts.bundle_code_lines(ctx.cleaned_entry, ctx.related_by_relpath())
    prompt = prompts.constraints_prompt(code, ep.method_name, param.name)

    def validate(value) -> ConstraintSet:
        record = _select_record(_as_record_list(value), "name", param.name)
        return parse_constraints(record, context=f"constraints for {param.name!r}")

    try:
        return _interrogate(provider, prompt, validate)
    except ConstraintContradiction as exc:
        if diagnostics is not None:
            diagnostics.add(
                "constraint-contradiction",
                f"{exc}; dropping the contradictory bounds for parameter {param.name!r}",
            )
        record = dict(exc.record or {})
        for bound in ("min_length", "max_length", "min", "max"):
            record.pop(bound, None)
        return parse_constraints(record, context=f"constraints for {param.name!r}")


def extract_endpoint(
    ctx: EndpointContext,
    ep: EndpointMethod,
    provider,
    diagnostics: DiagnosticSink | None = None,
) -> EndpointExtraction:
    """Run stages B and C for one endpoint."""
    parameters, responses = stage_b_params_responses(ctx, ep, provider)
    constrained = []
    for param in parameters:
        constraints = stage_c_constraints(ctx, ep, param, provider, diagnostics)
        constrained.append(param.with_constraints(constraints))
    return EndpointExtraction(endpoint=ep, parameters=constrained, responses=responses)


def run_pipeline(
    contexts: list[EndpointContext],
    provider,
    diagnostics: DiagnosticSink | None = None,
    *,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
) -> list[EndpointExtraction]:
    """Interrogate every context and return one extraction per unique endpoint.

    Endpoints are processed concurrently up to ``max_in_flight`` but results
    are collected in submission order, so output order is deterministic.
    A stage failure for one endpoint degrades to a diagnostic and the
    endpoint is omitted; endpoints with no extractable response are omitted
    the same way (an operation without responses cannot be assembled).
    """
    diagnostics = diagnostics if diagnostics is not None else DiagnosticSink()

    endpoint_jobs: list[tuple[EndpointContext, EndpointMethod]] = []
    seen: set[tuple[str, str]] = set()
    for ctx in contexts:
        try:
            endpoints = stage_a_endpoints(ctx, provider)
        except (SchemaViolation, ProviderError) as exc:
            diagnostics.add("stage-a-failure", str(exc), str(ctx.entry_file))
            continue
        for ep in endpoints:
            if ep.key() in seen:
                diagnostics.add(
                    "duplicate-endpoint",
                    f"{ep.http_method} {ep.endpoint_path} already extracted; keeping the first",
                    str(ctx.entry_file),
                )
                continue
            seen.add(ep.key())
            endpoint_jobs.append((ctx, ep))

    results: list[EndpointExtraction] = []
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        futures = [
            pool.submit(extract_endpoint, ctx, ep, provider, diagnostics)
            for ctx, ep in endpoint_jobs
        ]
        for (ctx, ep), future in zip(endpoint_jobs, futures):
            try:
                extraction = future.result()
            except (SchemaViolation, ProviderError) as exc:
                diagnostics.add(
                    "endpoint-failure",
                    f"{ep.http_method} {ep.endpoint_path}: {exc}",
                    str(ctx.entry_file),
                )
                continue
            if not extraction.responses:
                diagnostics.add(
                    "endpoint-without-responses",
                    f"{ep.http_method} {ep.endpoint_path}: no responses extracted; omitted",
                    str(ctx.entry_file),
                )
                continue
            results.append(extraction)
    return results
