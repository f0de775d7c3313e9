"""Offline figure generation for stored run artifacts.

Reads only the documented artifact file formats; no solver import.
"""

__version__ = "0.1.0"
