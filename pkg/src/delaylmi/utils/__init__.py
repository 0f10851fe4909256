"""
Utilities for delaylmi.
"""
