"""
Subcommands. Each module registers its parsers and handlers.
"""
