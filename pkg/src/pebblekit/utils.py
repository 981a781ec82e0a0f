from __future__ import annotations

import itertools
import re

from .models import (
    CoverRule,
    Family,
    GameSemantics,
    InvalidInstanceError,
    ParityRule,
    Quantifier,
)

_SEGMENT_SLUG_RE = re.compile(r"[^A-Za-z0-9\-_]+")
_DASH_RE = re.compile(r"-{2,}")
_RANGE_RE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$")


def sanitize_path_segment(value: str, fallback: str) -> str:
    if not value:
        return fallback
    slug = _SEGMENT_SLUG_RE.sub("-", value.strip())
    slug = _DASH_RE.sub("-", slug)
    slug = slug.strip("-")
    return slug or fallback


def parse_n_range(text: str) -> range:
    """Parse ``a..b`` (inclusive) or a single ``a``."""
    match = _RANGE_RE.match(text)
    if not match:
        raise InvalidInstanceError(
            f"invalid range {text!r}, expected a..b"
        )
    start = int(match.group(1))
    stop = int(match.group(2)) if match.group(2) else start
    if stop < start:
        raise InvalidInstanceError(f"empty range {text!r}")
    return range(start, stop + 1)


def parse_family(name: str) -> Family:
    normalized = name.strip().lower().replace("_", "-")
    try:
        return Family(normalized)
    except ValueError as exc:
        known = ", ".join(f.value for f in Family)
        raise InvalidInstanceError(
            f"unknown family {name!r} (known: {known})"
        ) from exc


def parse_families(text: str) -> list[Family]:
    if text.strip().lower() == "all":
        return list(Family)
    return [parse_family(part) for part in text.split(",") if part.strip()]


def all_semantics() -> list[GameSemantics]:
    """The eight readings in a fixed order."""
    return [
        GameSemantics(cover, parity, quantifier)
        for cover, parity, quantifier in itertools.product(
            CoverRule, ParityRule, Quantifier
        )
    ]


def parse_semantics(slug: str) -> GameSemantics:
    for semantics in all_semantics():
        if semantics.slug == slug.strip().lower():
            return semantics
    raise InvalidInstanceError(
        f"unknown semantics {slug!r}, expected e.g. resting-initial-exact"
    )
