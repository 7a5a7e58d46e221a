"""Numerical-range toolkit: boundary tracing, preimage fibers of ``x -> x*Ax``,
continuity probes and unitary reducibility."""

from . import boundary, continuity, fiber, matcore, reducibility, repro
from .errors import FovkitError

__version__ = "0.1.0"

__all__ = ["boundary", "continuity", "fiber", "matcore", "reducibility", "repro", "FovkitError"]
