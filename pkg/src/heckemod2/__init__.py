"""Mod-2 eigenvalue structure of T_2 on weight-2 cusp forms at prime level.

Exact modular-symbol computation of the Hecke operator T_2, bit-packed
GF(2) eigenvalue analysis, class-field-theoretic predictions of the
dihedral and reducible eigensystems, and a scanning pipeline comparing
the two.
"""

from . import gf2, modsym, pipeline, predict, quad
from .gf2 import BitMatrix, EigenReport
from .modsym import HeckeMatrix, IntegralityViolation, ModularSymbolSpace
from .pipeline import PrimeRecord, ScanSummary, SoundnessError, analyze, scan, stats
from .predict import HeuristicModel, Prediction
from .quad import ClassGroup, QuadField, QuadInvariants

__version__ = "0.1.0"

__all__ = [
    "gf2",
    "modsym",
    "pipeline",
    "predict",
    "quad",
    "BitMatrix",
    "EigenReport",
    "HeckeMatrix",
    "IntegralityViolation",
    "ModularSymbolSpace",
    "PrimeRecord",
    "ScanSummary",
    "SoundnessError",
    "analyze",
    "scan",
    "stats",
    "HeuristicModel",
    "Prediction",
    "ClassGroup",
    "QuadField",
    "QuadInvariants",
    "__version__",
]
