"""Universally robust dynamical-decoupling sequences and their simulation."""

__version__ = "0.1.0"
SCHEMA_VERSION = 1
