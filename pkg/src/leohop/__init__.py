"""Satellite-terrestrial cooperative routing toolkit for Walker Delta constellations."""

__version__ = "0.1.0"
