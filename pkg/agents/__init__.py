"""
Language-model agents and their backends
"""
