"""
Performance tests for pfnlab.
Learning and timing checks on synthetic tasks.
"""
