"""
Unit tests for pfnlab core components.
Domain models, services and use cases.
""" 