"""Semivalue data valuation and the robustness of value rankings to the utility choice."""

__version__ = "0.1.0"
