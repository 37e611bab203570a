"""
Unit tests for pfnlab adapters.
Dataset, config, checkpoint, run-directory and report adapters.
""" 