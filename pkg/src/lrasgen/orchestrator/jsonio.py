"""Pull the JSON payload out of a chat reply.

Replies wrap their JSON in markdown fences and prose; this finds the first
top-level JSON array or object with a real parser, so brackets inside
string literals never confuse extraction.
"""

from __future__ import annotations

import json
import re


class NoJsonFound(ValueError):
    """The reply contains no parseable JSON array or object."""


_FENCE = re.compile(r"^```[\w-]*\s*$", re.MULTILINE)

_decoder = json.JSONDecoder()


def extract_json(raw_reply: str):
    """First top-level JSON array or object in the reply; trailing prose ignored."""
    text = _FENCE.sub("", raw_reply)
    for start, ch in enumerate(text):
        if ch not in "[{":
            continue
        try:
            value, _ = _decoder.raw_decode(text, start)
        except json.JSONDecodeError:
            continue
        return value
    raise NoJsonFound(f"no JSON value found in reply of {len(raw_reply)} chars")
