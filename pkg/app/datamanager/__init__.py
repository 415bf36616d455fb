"""
    Persistence, exception classes and the CLI error handler.
"""
