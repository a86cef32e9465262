# File: yieldpoint/__init__.py
"""Yieldpoint: a core language for distributed algorithms, an optimizer that
incrementalizes their synchronization conditions, and a seeded simulator to
run both."""

__version__ = "0.1.0"
