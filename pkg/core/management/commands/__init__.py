"""
Makes the management/commands directory a Python package.
"""
