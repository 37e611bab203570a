"""
Use cases for pfnlab.
Orchestrate datasets, checkpoints and the training and inference services.
"""
