"""Locate endpoint entry files in a project tree.

Walks a project root, filters files by the framework's suffix, and tests
their content against the framework regexes. For configuration-based
frameworks the routing configuration files are located by basename, their
route-handler references are extracted, and each reference is resolved to
the source file defining the handler; those files become the entries.

Matching is purely lexical over whole-file content: matches inside comments
or string literals count. Results are sorted so identical trees always
produce identical scan results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .criteria import FrameworkCriteria, FrameworkKind
from .diagnostics import DiagnosticSink

# Vendored/build/VCS trees produce false entries and waste prompt tokens.
DEFAULT_SKIP_DIRS = frozenset(
    {".git", "node_modules", "target", "build", "venv", "__pycache__", "bin", "obj"}
)


class RootNotFound(FileNotFoundError):
    """The scan root does not exist or is not a directory."""


@dataclass
class ScanResult:
    framework: str
    entry_files: list[Path]
    configuration_files_found: list[Path] = field(default_factory=list)
    diagnostics: DiagnosticSink = field(default_factory=DiagnosticSink)

    def to_dict(self) -> dict:
        return {
            "framework": self.framework,
            "entry_files": [str(p) for p in self.entry_files],
            "configuration_files_found": [str(p) for p in self.configuration_files_found],
            "diagnostics": self.diagnostics.to_list(),
        }


def _check_root(root: Path) -> Path:
    root = Path(root)
    if not root.is_dir():
        raise RootNotFound(f"project root not found: {root}")
    return root


def walk_files(
    root: Path,
    suffix: str = "",
    *,
    skip_dirs: frozenset[str] = DEFAULT_SKIP_DIRS,
    skip_hidden: bool = True,
) -> list[Path]:
    """All regular files under root whose names end with suffix, sorted.

    Symbolic links (directory or file) are never followed, so link cycles
    terminate. Hidden directories and the common vendored/build directories
    are skipped unless disabled.
    """
    root = _check_root(root)
    found: list[Path] = []
    stack = [root]
    while stack:
        directory = stack.pop()
        try:
            entries = sorted(directory.iterdir())
        except OSError:
            continue
        for entry in entries:
            name = entry.name
            if entry.is_symlink():
                continue
            if entry.is_dir():
                if name in skip_dirs or (skip_hidden and name.startswith(".")):
                    continue
                stack.append(entry)
            elif entry.is_file() and name.endswith(suffix):
                found.append(entry)
    return sorted(found)


def read_text_lossy(path: Path) -> str:
    """Read a file as UTF-8, replacing undecodable bytes so binary-ish files never abort a scan."""
    return path.read_text(encoding="utf-8", errors="replace")


# Tolerant route-entry pattern for configuration files: captures the URL
# literal and the dotted handler expression of path(...) / re_path(...) calls,
# including entries that carry extra keyword arguments.
_ROUTE_ENTRY = re.compile(
    r"""(?:path|re_path)\(\s*['"]([^'"]*)['"]\s*,\s*([A-Za-z_][\w.]*)"""
)


def extract_route_handlers(config_text: str) -> list[str]:
    """Dotted handler references declared in a routing configuration file."""
    refs = []
    for match in _ROUTE_ENTRY.finditer(config_text):
        handler = match.group(2)
        if handler and handler not in refs:
            refs.append(handler)
    return refs


def _resolve_handler(handler: str, symbol_map: dict[str, str]) -> str | None:
    """Map a dotted handler reference to its defining file via the symbol map.

    ``app.views.StatsView.as_view`` resolves through its trailing
    class/function name; the longest resolvable trailing component wins.
    """
    parts = handler.split(".")
    if parts and parts[-1] == "as_view":
        parts = parts[:-1]
    for name in reversed(parts):
        if name in symbol_map:
            return symbol_map[name]
    return None


def identify_entry_files(
    root: Path,
    criteria: FrameworkCriteria,
    *,
    skip_dirs: frozenset[str] = DEFAULT_SKIP_DIRS,
    skip_hidden: bool = True,
) -> ScanResult:
    """Scan ``root`` for the framework's endpoint entry files.

    Annotation-based frameworks: every suffix-matching file whose content
    matches at least one criteria regex. Configuration-based frameworks:
    configuration files are located by basename, validated against the
    criteria regexes, and their route-handler references resolved to source
    files, which become the entries. Unreadable files are skipped with a
    diagnostic, never fatally.
    """
    root = _check_root(root)
    diagnostics = DiagnosticSink()
    patterns = criteria.compiled_regex()

    if criteria.kind == FrameworkKind.ANNOTATION_BASED:
        entries = []
        for path in walk_files(root, criteria.suffix, skip_dirs=skip_dirs, skip_hidden=skip_hidden):
            try:
                content = read_text_lossy(path)
            except OSError as exc:
                diagnostics.add("unreadable-file", f"skipped: {exc}", str(path))
                continue
            if any(p.search(content) for p in patterns):
                entries.append(path)
        return ScanResult(criteria.name, sorted(set(entries)), [], diagnostics)

    # Configuration-based: find routing configuration files by basename, then
    # resolve the handlers they reference. Symbol resolution reuses the
    # extractor's name-to-file map.
    from .extractor import build_symbol_map

    config_basenames = set(criteria.configuration_files or ())
    config_files = []
    for path in walk_files(root, "", skip_dirs=skip_dirs, skip_hidden=skip_hidden):
        if path.name in config_basenames:
            config_files.append(path)

    symbol_map, symbol_diags = build_symbol_map(root, criteria.language, skip_dirs=skip_dirs)
    diagnostics.extend(symbol_diags)

    entries = []
    confirmed_configs = []
    for config in sorted(config_files):
        try:
            content = read_text_lossy(config)
        except OSError as exc:
            diagnostics.add("unreadable-file", f"skipped: {exc}", str(config))
            continue
        if not any(p.search(content) for p in patterns):
            diagnostics.add(
                "config-no-routes", "configuration file matched no criteria regex", str(config)
            )
            continue
        confirmed_configs.append(config)
        for handler in extract_route_handlers(content):
            resolved = _resolve_handler(handler, symbol_map)
            if resolved is None:
                diagnostics.add("unresolved-route", f"handler {handler!r} not found in project", str(config))
            elif str(resolved).endswith(criteria.suffix):
                entries.append(Path(resolved))
    return ScanResult(criteria.name, sorted(set(entries)), confirmed_configs, diagnostics)
