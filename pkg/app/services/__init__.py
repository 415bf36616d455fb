"""
    Experiment orchestration over the file data manager.
"""
