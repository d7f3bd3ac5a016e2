"""HTTP service exposing lint, statistics, agreement and validation."""

from .app import app, create_app

__all__ = ["app", "create_app"]
