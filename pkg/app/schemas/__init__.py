"""
    Pydantic models for configs, graph files, reports and experiment specs.
"""
