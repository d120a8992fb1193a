"""HTTP service wrapping one scoring handle."""

from .app import create_app

__all__ = ["create_app"]
