"""
pfnlab test suite.
Comprehensive test coverage for unit, integration, and performance testing.
""" 