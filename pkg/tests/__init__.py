"""
Tests for bandsel.
"""
