"""
Command-line interface for pfnlab.
"""
