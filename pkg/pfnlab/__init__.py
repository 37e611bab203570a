"""
pfnlab: retrieval-transformer tabular learning with synthetic-prior pretraining.
"""
__version__ = "0.1.0"
