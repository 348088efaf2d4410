"""Radial numerics for Lichnerowicz-type equations on model manifolds."""
__version__ = "0.1.0"
