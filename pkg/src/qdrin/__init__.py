"""Exact arithmetic for Drinfeld modules and their noncommutative-torus data."""

__version__ = "0.1.0"
