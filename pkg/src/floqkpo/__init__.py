"""Floquet coupling design and verification toolkit for KPO Ising machines."""

__version__ = "0.1.0"
