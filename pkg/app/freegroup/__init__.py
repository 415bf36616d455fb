"""
    Free groups: reduced and cyclic words, automorphisms, Whitehead algorithms.
"""
