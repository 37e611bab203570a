"""
Test utilities and helpers for pfnlab tests.
Table, episode and config factories plus mock ports.
"""
