"""Staged LLM interrogation of endpoint code bundles."""

from .jsonio import NoJsonFound, extract_json
from .providers import (
    FixtureMiss,
    FixtureProvider,
    LiveProvider,
    ProviderError,
    RecordingProvider,
    request_hash,
    send_chat,
)
from .records import (
    ConstraintContradiction,
    ConstraintSet,
    EndpointExtraction,
    EndpointMethod,
    ParameterSpec,
    ProviderConfig,
    ResponseSpec,
    SchemaViolation,
)
from .stages import (
    extract_endpoint,
    run_pipeline,
    stage_a_endpoints,
    stage_b_params_responses,
    stage_c_constraints,
)

__all__ = [
    "ConstraintContradiction",
    "ConstraintSet",
    "EndpointExtraction",
    "EndpointMethod",
    "FixtureMiss",
    "FixtureProvider",
    "LiveProvider",
    "NoJsonFound",
    "ParameterSpec",
    "ProviderConfig",
    "ProviderError",
    "RecordingProvider",
    "ResponseSpec",
    "SchemaViolation",
    "extract_endpoint",
    "extract_json",
    "request_hash",
    "run_pipeline",
    "send_chat",
    "stage_a_endpoints",
    "stage_b_params_responses",
    "stage_c_constraints",
]
