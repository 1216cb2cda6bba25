"""Per-framework detection rules for endpoint entry files.

Each supported web framework gets a criteria record describing how to
recognize the source files that declare its routes: a file-name suffix, a
set of content regexes, and (for frameworks that route through a dedicated
configuration file) the configuration file basenames.

The Spring Boot and Django rules follow the framework's documented routing
annotations and urlpatterns tables. The Jersey, Flask, Web.py, and ASP.NET
Core rules are reconstructed from each framework's routing idioms (the
docstring of ``builtin_criteria`` names the idiom behind each one); they can
be replaced at runtime through ``load_criteria``.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass


class MalformedCriteria(ValueError):
    """A criteria record failed validation; names the record and field."""

    def __init__(self, record: str, field_name: str, reason: str):
        super().__init__(f"criteria record {record!r}, field {field_name!r}: {reason}")
        self.record = record
        self.field_name = field_name
        self.reason = reason


class FrameworkKind(enum.Enum):
    ANNOTATION_BASED = "annotation_based"
    CONFIGURATION_BASED = "configuration_based"


@dataclass(frozen=True)
class FrameworkCriteria:
    """Detection rules for one framework.

    A source file is an endpoint entry candidate when its name ends with
    ``suffix`` and its content matches at least one expression in ``regex``.
    ``configuration_files`` is present only for frameworks whose routes live
    in a dedicated configuration file (the file basenames, no paths).
    """

    name: str
    language: str
    suffix: str
    regex: tuple[str, ...]
    configuration_files: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.name:
            raise MalformedCriteria("<unnamed>", "name", "must be non-empty")
        if not self.suffix or not self.suffix.startswith("."):
            raise MalformedCriteria(self.name, "suffix", "must be non-empty and start with '.'")
        if not self.regex:
            raise MalformedCriteria(self.name, "regex", "must list at least one pattern")
        for pattern in self.regex:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise MalformedCriteria(self.name, "regex", f"invalid pattern {pattern!r}: {exc}") from exc
        if self.configuration_files is not None:
            if not self.configuration_files:
                raise MalformedCriteria(self.name, "configuration_files", "must be non-empty when present")
            for basename in self.configuration_files:
                if "/" in basename or "\\" in basename:
                    raise MalformedCriteria(
                        self.name, "configuration_files", f"{basename!r} must be a basename without path separators"
                    )

    @property
    def kind(self) -> FrameworkKind:
        if self.configuration_files is not None:
            return FrameworkKind.CONFIGURATION_BASED
        return FrameworkKind.ANNOTATION_BASED

    def compiled_regex(self) -> list[re.Pattern]:
        return [re.compile(p) for p in self.regex]

    def matches_content(self, content: str) -> bool:
        return any(p.search(content) for p in self.compiled_regex())

    def to_dict(self) -> dict:
        d: dict = {
            "name": self.name,
            "language": self.language,
            "suffix": self.suffix,
            "regex": list(self.regex),
        }
        if self.configuration_files is not None:
            d["configuration_files"] = list(self.configuration_files)
        return d


def builtin_criteria() -> list[FrameworkCriteria]:
    """Criteria for the six supported frameworks.

    Source idiom behind each record:

    * spring_boot  -- mapping/controller annotations (``@RequestMapping(...)``,
      ``@GetMapping(...)``, ``@RestController(...)``, ...).
    * jersey       -- JAX-RS resource annotations (``@Path(...)`` plus the
      ``@GET``/``@POST``/... verb annotations).
    * flask        -- route decorators (``@app.route(...)`` and
      ``@blueprint.route(...)``).
    * django       -- ``urlpatterns`` tables in a dedicated ``urls.py``
      configuration file; route handlers referenced there are resolved to
      their defining files.
    * web_py       -- in-code ``urls = (...)`` URL tuple tables; classified as
      annotation-based because the table lives in ordinary code files rather
      than a fixed configuration basename.
    * aspnet_core  -- routing attributes (``[Route(...)]``, ``[HttpGet...]``,
      ``[ApiController]``).

    The Jersey, Flask, Web.py, and ASP.NET Core patterns are reconstructions
    from framework documentation; override them with a user criteria file if
    a project uses different idioms.
    """
    return [
        FrameworkCriteria(
            name="spring_boot",
            language="java",
            suffix=".java",
            regex=(
                r"@(GetMapping|PostMapping|PutMapping|DeleteMapping|PatchMapping|"
                r"RequestMapping|Controller|RestController)\([^)]*\)",
            ),
        ),
        FrameworkCriteria(
            name="jersey",
            language="java",
            suffix=".java",
            regex=(
                r"@Path\([^)]*\)",
                r"@(GET|POST|PUT|DELETE|PATCH|HEAD|OPTIONS)\b",
            ),
        ),
        FrameworkCriteria(
            name="flask",
            language="python",
            suffix=".py",
            regex=(r"@(?:app|blueprint)\.route\([^)]*\)",),
        ),
        FrameworkCriteria(
            name="django",
            language="python",
            suffix=".py",
            regex=(
                r"urlpatterns\s*=\s*\[[^\]]*(path\(['\"]([^'\"]+)['\"],\s*([^,]+)\)|"
                r"re_path\(['\"]([^'\"]+)['\"],\s*([^,]+)\))[^\]]*\]",
            ),
            configuration_files=("urls.py",),
        ),
        FrameworkCriteria(
            name="web_py",
            language="python",
            suffix=".py",
            regex=(r"urls\s*=\s*\(",),
        ),
        FrameworkCriteria(
            name="aspnet_core",
            language="csharp",
            suffix=".cs",
            regex=(
                r"\[Route\([^)]*\)\]",
                r"\[Http(Get|Post|Put|Delete|Patch|Head|Options)[^\]]*\]",
                r"\[ApiController\]",
            ),
        ),
    ]


_REQUIRED_FIELDS = ("name", "language", "suffix", "regex")


def _criteria_from_record(record: dict) -> FrameworkCriteria:
    if not isinstance(record, dict):
        raise MalformedCriteria("<non-object>", "record", "each entry must be a JSON object")
    name = record.get("name") or "<unnamed>"
    for key in _REQUIRED_FIELDS:
        if key not in record:
            raise MalformedCriteria(str(name), key, "missing required field")
    regex = record["regex"]
    if not isinstance(regex, list) or not all(isinstance(p, str) for p in regex):
        raise MalformedCriteria(str(name), "regex", "must be a list of pattern strings")
    configuration_files = record.get("configuration_files")
    if configuration_files is not None:
        if not isinstance(configuration_files, list) or not all(isinstance(b, str) for b in configuration_files):
            raise MalformedCriteria(str(name), "configuration_files", "must be a list of basenames")
        configuration_files = tuple(configuration_files)
    return FrameworkCriteria(
        name=str(record["name"]),
        language=str(record["language"]),
        suffix=str(record["suffix"]),
        regex=tuple(regex),
        configuration_files=configuration_files,
    )


def load_criteria(source: str) -> list[FrameworkCriteria]:
    """Parse a JSON criteria document and merge it over the builtins.

    ``source`` is the document text: a JSON list of criteria records with the
    field names of ``FrameworkCriteria``. A record whose name matches a
    builtin replaces that builtin in place; new names are appended in
    document order. An empty document leaves the builtins unchanged.

    Raises MalformedCriteria naming the offending record and field when the
    document is invalid.
    """
    text = source.strip()
    if not text:
        records: list = []
    else:
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedCriteria("<document>", "json", str(exc)) from exc
    if not isinstance(records, list):
        raise MalformedCriteria("<document>", "json", "top-level value must be a list of records")

    merged = builtin_criteria()
    index = {c.name: i for i, c in enumerate(merged)}
    for record in records:
        criteria = _criteria_from_record(record)
        if criteria.name in index:
            merged[index[criteria.name]] = criteria
        else:
            index[criteria.name] = len(merged)
            merged.append(criteria)
    return merged


def find_criteria(name: str, available: list[FrameworkCriteria] | None = None) -> FrameworkCriteria:
    """Look up one framework by name; raises KeyError listing known names."""
    available = available if available is not None else builtin_criteria()
    for c in available:
        if c.name == name:
            return c
    known = ", ".join(c.name for c in available)
    raise KeyError(f"unknown framework {name!r}; known frameworks: {known}")
