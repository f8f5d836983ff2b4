"""
emodel-lab - Main package
"""
