"""Combinatorial skeleton of moduli of stable curves: dual graphs, strata posets, finite
category calculus."""

__version__ = "0.1.0"
