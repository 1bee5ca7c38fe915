"""Certified reproduction of the bound pipeline for W_m^(n+k) + W_m^n = W_r
with W the Lucas or the Pell numbers."""

__version__ = "0.1.0"
