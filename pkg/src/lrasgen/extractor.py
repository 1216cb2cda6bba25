"""Build per-entry-file code bundles sized for LLM submission.

For each endpoint entry file this module resolves the project-local files it
imports, cleans every file (dropping blank lines, logging statements,
license banners, and imports that point outside the project), and packages
the results as EndpointContext bundles with a rough token estimate.

Cleaning and import resolution are line-based and lexical, not AST-based,
so they work unchanged across Java, Python, and C# sources. Routes
registered through macros or reflection are out of reach of this pass.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .criteria import FrameworkCriteria, FrameworkKind, find_criteria
from .diagnostics import DiagnosticSink
from .scanner import DEFAULT_SKIP_DIRS, ScanResult, read_text_lossy, walk_files

LANGUAGE_SUFFIXES = {
    "java": ".java",
    "python": ".py",
    "csharp": ".cs",
}

# Rough prompt-token cost: characters / 4. Used only for budget checks
# before submission, never for billing.
TOKEN_CHARS = 4

# Dropping this many tokens from the budget leaves room for the reply.
DEFAULT_RESPONSE_RESERVE = 4096


@dataclass
class EndpointContext:
    """One entry file plus its cleaned, project-local dependency closure."""

    entry_file: Path
    cleaned_entry: str
    related: dict[Path, str] = field(default_factory=dict)
    token_estimate: int = 0
    config_files: tuple[Path, ...] = ()
    root: Path | None = None
    diagnostics: DiagnosticSink = field(default_factory=DiagnosticSink)

    def relpath(self, path: Path) -> str:
        """Project-relative posix path, keeping prompts stable across checkouts."""
        if self.root is not None:
            try:
                return Path(path).relative_to(self.root).as_posix()
            except ValueError:
                pass
        return Path(path).name

    def related_by_relpath(self, paths=None) -> dict[str, str]:
        selected = self.related if paths is None else {p: self.related[p] for p in paths if p in self.related}
        return {self.relpath(p): text for p, text in selected.items()}

    def to_dict(self, root: Path | None = None) -> dict:
        root = root or self.root

        def rel(p: Path) -> str:
            if root is not None:
                try:
                    return p.relative_to(root).as_posix()
                except ValueError:
                    pass
            return str(p)

        return {
            "entry_file": rel(self.entry_file),
            "cleaned_entry": self.cleaned_entry,
            "related": {rel(p): text for p, text in self.related.items()},
            "token_estimate": self.token_estimate,
            "config_files": [rel(p) for p in self.config_files],
            "diagnostics": self.diagnostics.to_list(),
        }


def estimate_tokens(*texts: str) -> int:
    chars = sum(len(t) for t in texts)
    return math.ceil(chars / TOKEN_CHARS)


# --- symbol map -------------------------------------------------------------

_JAVA_TYPE = re.compile(r"^\s*(?:@\w+(?:\([^)]*\))?\s+)*(?:(?:public|final|abstract|static|sealed)\s+)*(?:class|interface|enum|record)\s+([A-Za-z_]\w*)", re.MULTILINE)
_PY_TOPLEVEL = re.compile(r"^(?:class|def)\s+([A-Za-z_]\w*)", re.MULTILINE)
_CSHARP_TYPE = re.compile(r"^\s*(?:\[[^\]]*\]\s*)*(?:(?:public|internal|sealed|abstract|static|partial)\s+)*(?:class|interface|record|struct|enum)\s+([A-Za-z_]\w*)", re.MULTILINE)

_SYMBOL_PATTERNS = {
    "java": _JAVA_TYPE,
    "python": _PY_TOPLEVEL,
    "csharp": _CSHARP_TYPE,
}


def build_symbol_map(
    root: Path,
    language: str,
    *,
    skip_dirs: frozenset[str] = DEFAULT_SKIP_DIRS,
) -> tuple[dict[str, str], DiagnosticSink]:
    """Map declared type/class/function names to their defining files.

    Files are visited in lexicographic order, so when two files declare the
    same name the lexicographically later file wins; each collision is
    recorded as a diagnostic.
    """
    diagnostics = DiagnosticSink()
    pattern = _SYMBOL_PATTERNS.get(language)
    suffix = LANGUAGE_SUFFIXES.get(language)
    if pattern is None or suffix is None:
        diagnostics.add("unknown-language", f"no symbol patterns for language {language!r}")
        return {}, diagnostics

    symbols: dict[str, str] = {}
    for path in walk_files(root, suffix, skip_dirs=skip_dirs):
        try:
            content = read_text_lossy(path)
        except OSError as exc:
            diagnostics.add("unreadable-file", f"skipped: {exc}", str(path))
            continue
        for match in pattern.finditer(content):
            name = match.group(1)
            previous = symbols.get(name)
            if previous is not None and previous != str(path):
                diagnostics.add(
                    "duplicate-symbol",
                    f"{name!r} also declared in {previous}; keeping {path}",
                    str(path),
                )
            symbols[name] = str(path)
    return symbols, diagnostics


# --- import resolution ------------------------------------------------------

_JAVA_IMPORT = re.compile(r"^\s*import\s+(?:static\s+)?([\w.]+?)(\.\*)?\s*;", re.MULTILINE)
_PY_IMPORT = re.compile(r"^(?:import\s+([\w.]+(?:\s*,\s*[\w.]+)*)|from\s+([\w.]+)\s+import\s+([^\n#]+))", re.MULTILINE)
_CSHARP_USING = re.compile(r"^\s*using\s+(?:static\s+)?(?:\w+\s*=\s*)?([\w.]+)\s*;", re.MULTILINE)


def _imported_names(content: str, language: str) -> list[str]:
    """Candidate symbol names referenced by a file's import statements."""
    names: list[str] = []

    def add(name: str) -> None:
        if name and name not in names:
            names.append(name)

    if language == "java":
        for match in _JAVA_IMPORT.finditer(content):
            if match.group(2):
                continue  # wildcard imports carry no resolvable simple name
            parts = match.group(1).split(".")
            add(parts[-1])
            if len(parts) > 1:
                add(parts[-2])  # static member imports name the type second-to-last
    elif language == "python":
        for match in _PY_IMPORT.finditer(content):
            if match.group(1):
                for module in match.group(1).split(","):
                    add(module.strip().split(".")[-1])
            else:
                add(match.group(2).split(".")[-1])
                for item in match.group(3).split(","):
                    item = item.strip().split(" as ")[0].strip()
                    if item and item != "*":
                        add(item.strip("()"))
    elif language == "csharp":
        for match in _CSHARP_USING.finditer(content):
            add(match.group(1).split(".")[-1])
    return names


def resolve_imports(
    entry_file: Path,
    root: Path,
    symbols: dict[str, str],
    *,
    language: str | None = None,
) -> list[Path]:
    """Project-local files imported by ``entry_file`` (one level deep).

    Imported names are mapped through the symbol map; only paths under
    ``root`` are returned, without the entry file itself, deduplicated and
    sorted.
    """
    entry_file = Path(entry_file)
    root = Path(root).resolve()
    if language is None:
        language = {v: k for k, v in LANGUAGE_SUFFIXES.items()}.get(entry_file.suffix, "python")
    content = read_text_lossy(entry_file)
    resolved: set[Path] = set()
    for name in _imported_names(content, language):
        target = symbols.get(name)
        if target is None:
            continue
        target_path = Path(target)
        try:
            target_path.resolve().relative_to(root)
        except ValueError:
            continue  # defined outside the project root
        if target_path.resolve() != entry_file.resolve():
            resolved.add(target_path)
    return sorted(resolved)


# --- cleaning ---------------------------------------------------------------

_BANNER_KEYWORDS = re.compile(
    r"copyright|licen[cs]e|licensed|all rights reserved|apache|spdx|gnu\b|\bmit\b|\bbsd\b",
    re.IGNORECASE,
)
_COMMENT_LINE = re.compile(r"^\s*(//|/\*|\*|\*/|#)")
_LOG_LINE = re.compile(
    r"^\s*("
    r"System\.(out|err)\.print\w*\s*\(|"
    r"(log|logger|logging|LOG|LOGGER)\.(trace|debug|info|warn|warning|error|critical|exception|fatal)\s*\(|"
    r"print\s*\(|"
    r"Console\.Write\w*\s*\(|"
    r"console\.(log|error|warn|info)\s*\(|"
    r"\w+\.printStackTrace\s*\(\s*\)"
    r")"
)
_IMPORT_LINE = re.compile(r"^\s*(import\s|from\s+[\w.]+\s+import\s|using\s+[\w.=\s]+;)")


def _strip_banner(lines: list[str]) -> list[str]:
    """Drop a leading comment block when it reads like a license banner."""
    end = 0
    while end < len(lines) and (_COMMENT_LINE.match(lines[end]) or not lines[end].strip()):
        end += 1
    if end == 0:
        return lines
    block = "\n".join(lines[:end])
    if _BANNER_KEYWORDS.search(block):
        return lines[end:]
    return lines


def _keeps_import(line: str, local_symbols: set[str] | None, language_hint: str | None) -> bool:
    if local_symbols is None:
        return True
    for lang in ([language_hint] if language_hint else ["java", "python", "csharp"]):
        for name in _imported_names(line, lang):
            if name in local_symbols:
                return True
    return False


def clean_code(
    text: str,
    *,
    local_symbols: set[str] | None = None,
    language: str | None = None,
) -> str:
    """Drop endpoint-irrelevant lines from a source file.

    Removes blank lines, logging/print statements (consuming continuation
    lines of a multi-line call), leading license/header banners, and, when
    ``local_symbols`` is given, import statements that reference nothing
    declared in the project. Annotations, signatures, bodies, and comments
    adjacent to declarations survive. Idempotent.
    """
    if not text:
        return ""
    lines = _strip_banner(text.splitlines())
    kept: list[str] = []
    pending_call_depth = 0
    for line in lines:
        if pending_call_depth > 0:
            pending_call_depth += line.count("(") - line.count(")")
            continue
        if _LOG_LINE.match(line):
            depth = line.count("(") - line.count(")")
            if depth > 0:
                pending_call_depth = depth
            continue
        if _IMPORT_LINE.match(line) and not _keeps_import(line, local_symbols, language):
            continue
        if not line.strip():
            continue
        kept.append(line.rstrip())
    return "\n".join(kept)


# --- context assembly -------------------------------------------------------

def _closure(
    entry: Path,
    root: Path,
    symbols: dict[str, str],
    language: str,
    depth: int,
) -> dict[Path, int]:
    """Imported project files mapped to their hop distance from the entry."""
    seen: dict[Path, int] = {}
    frontier = [entry]
    for level in range(1, depth + 1):
        next_frontier: list[Path] = []
        for source in frontier:
            for target in resolve_imports(source, root, symbols, language=language):
                if target == entry or target in seen:
                    continue
                seen[target] = level
                next_frontier.append(target)
        frontier = sorted(next_frontier)
        if not frontier:
            break
    return seen


def build_contexts(
    scan: ScanResult,
    root: Path,
    criteria: FrameworkCriteria | None = None,
    *,
    import_depth: int = 1,
    token_budget: int | None = None,
    response_reserve: int = DEFAULT_RESPONSE_RESERVE,
) -> list[EndpointContext]:
    """One EndpointContext per scanned entry file.

    Related files hold the cleaned text of the entry's resolved imports up
    to ``import_depth`` hops; configuration-based frameworks also get the
    routing configuration file in the bundle. When ``token_budget`` is set
    and a bundle estimate exceeds budget minus the response reserve, related
    files are dropped lowest-priority-first (transitive hops before direct
    imports, larger files before smaller) with a diagnostic per drop.
    """
    root = Path(root)
    if criteria is None:
        criteria = find_criteria(scan.framework)
    language = criteria.language
    symbols, symbol_diags = build_symbol_map(root, language)
    local_names = set(symbols)

    contexts = []
    for entry in sorted(scan.entry_files):
        diagnostics = DiagnosticSink()
        diagnostics.extend(symbol_diags)
        cleaned_entry = clean_code(read_text_lossy(entry), local_symbols=local_names, language=language)

        depths = _closure(entry, root, symbols, language, import_depth)
        config_paths: list[Path] = []
        if criteria.kind == FrameworkKind.CONFIGURATION_BASED:
            for config in scan.configuration_files_found:
                if config != entry and config not in depths:
                    depths[config] = 0  # routing table: pinned ahead of imports
                config_paths.append(config)

        related: dict[Path, str] = {}
        for path in sorted(depths, key=lambda p: (depths[p], str(p))):
            try:
                related[path] = clean_code(
                    read_text_lossy(path), local_symbols=local_names, language=language
                )
            except OSError as exc:
                diagnostics.add("unreadable-file", f"skipped: {exc}", str(path))

        if token_budget is not None:
            limit = token_budget - response_reserve
            # Evict transitive hops before direct imports, larger before
            # smaller; configuration files go last.
            order = sorted(
                (p for p in related if p not in config_paths),
                key=lambda p: (-depths.get(p, 0), -len(related[p]), str(p)),
            ) + [p for p in related if p in config_paths]
            for victim in order:
                if estimate_tokens(cleaned_entry, *related.values()) <= limit:
                    break
                diagnostics.add(
                    "over-budget-drop",
                    f"dropped from bundle (budget {limit} tokens)",
                    str(victim),
                )
                del related[victim]

        contexts.append(
            EndpointContext(
                entry_file=entry,
                cleaned_entry=cleaned_entry,
                related=related,
                token_estimate=estimate_tokens(cleaned_entry, *related.values()),
                config_files=tuple(p for p in config_paths if p in related),
                root=root,
                diagnostics=diagnostics,
            )
        )
    return contexts
