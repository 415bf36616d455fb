"""
    Points, paths and experiments in Outer space.
"""
