"""
Commands package for bandsel.

This package contains all the command implementations for the CLI.
"""
