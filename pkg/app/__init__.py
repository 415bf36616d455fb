"""
    Marked metric graphs of Outer space, the Lipschitz metric and the primitive loop complex.
"""
