"""
Literal file contents shared by the tests.
"""
