"""Shared sentinel labels used across the pipeline.

Segment ids are non-negative integers.  Three sentinels never collide with
them: BACKGROUND and CROSSING appear as cell states in the 2D automaton
grid, BORDER only as a graph vertex standing in for the domain surface.
"""

BACKGROUND = -1
CROSSING = -2
BORDER = -3
