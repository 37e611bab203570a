"""
Integration tests for pfnlab.
Each test drives the command-line entry point against temporary files.
"""
