"""
Test suite for subspace phase retrieval
"""
