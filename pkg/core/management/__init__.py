"""
Makes the management directory a Python package.
"""
