"""
Test suite for the THz indoor coverage lab.
"""
