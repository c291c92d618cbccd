"""Verifiable (t, n) threshold quantum secret sharing on a single qudit."""

from .gf import FieldElement, PrimeModulus
from .kernels import backend, use_backend
from .protocol import SessionParams, Verdict, run_honest_session, run_session
from .qudit import MubLabel, QuditState

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "PrimeModulus",
    "MubLabel",
    "QuditState",
    "SessionParams",
    "Verdict",
    "run_session",
    "run_honest_session",
    "backend",
    "use_backend",
]
