"""
Finite cube complexes: cells, links, cubical maps and text formats.
"""
