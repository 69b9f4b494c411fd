"""Identifiability analysis of linear ODE models from input-output equations."""

__version__ = "0.1.0"
