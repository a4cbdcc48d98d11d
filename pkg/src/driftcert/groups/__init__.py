"""Prime-order group backends (real curve and exponent-transparent test group)."""

from .base import GENERATOR_LABELS, GroupBackend, get_backend

__all__ = ["GENERATOR_LABELS", "GroupBackend", "get_backend"]
