"""Workbench defaults from the `WORKBENCH` settings dict."""
from pathlib import Path

from django.conf import settings

from .electoral import ExploreBounds

DEFAULTS = {
    "MAX_DEPTH": 40,
    "MAX_UNFOLD": 2,
    "MAX_STATES": 100_000,
    "AUTOMORPHISM_BOUND": 8,
    "TRACE_DIR": "traces",
}


def get(key):
    return getattr(settings, "WORKBENCH", {}).get(key, DEFAULTS[key])


def default_bounds(depth=None, unfold=None, states=None) -> ExploreBounds:
    return ExploreBounds(
        max_depth=get("MAX_DEPTH") if depth is None else depth,
        max_rep_unfoldings=get("MAX_UNFOLD") if unfold is None else unfold,
        max_states=get("MAX_STATES") if states is None else states,
    )


def trace_path(filename) -> Path:
    path = Path(filename)
    return path if path.is_absolute() or path.parent != Path(".") else Path(get("TRACE_DIR")) / path
