"""
Unit tests for pfnlab.
Tests that verify individual components in isolation with mocked dependencies.
""" 