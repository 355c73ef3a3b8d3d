"""
Tests for the bandsel package.
"""
