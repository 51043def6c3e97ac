"""Exact-arithmetic workbench for minimal A-infinity structures on quiver
categories: relation checking, homological transfer, cyclic potentials,
noncommutative calculus, Hochschild complexes, quiver representations with
moment maps, stability, and Maurer-Cartan local models."""

from .field import QQ, GF, FieldCtx, FieldError

__all__ = ["QQ", "GF", "FieldCtx", "FieldError"]
__version__ = "0.1.0"
