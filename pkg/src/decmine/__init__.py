"""Predictive decision mining for event logs with Shapley-value explanations."""

__version__ = "0.1.0"
