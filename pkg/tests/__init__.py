"""
Test suite for the PRDL fitting toolkit.
"""
