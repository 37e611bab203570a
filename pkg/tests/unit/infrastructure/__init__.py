"""
Unit tests for pfnlab infrastructure components.
"""
