"""Exact simulation of Landau-Zener charged spin-chain quantum batteries."""

__version__ = "0.1.0"
