"""Equitable partitions and the reduced random-walk matrix of a graph.

Refining vertex cells by neighbour counts yields the coarsest partition in
which every vertex sees the same number of neighbours in every cell.  The
random walk then descends to the cells: averaging over cells intertwines
the walk with a small row-stochastic matrix, and what the quotient misses
is a residual that the averaging map annihilates.
"""

import numpy as np

from specat import (
    coarsest_equitable_partition,
    reduced_transition_matrix,
    residual_part,
    walk_matrix,
)


def show(name, adjacency):
    adjacency = np.asarray(adjacency)
    partition = coarsest_equitable_partition(adjacency)
    quotient = reduced_transition_matrix(adjacency, partition)
    walk = walk_matrix(adjacency)
    print(f"{name}: cells {partition.cells}")
    print("  cell-to-cell neighbour counts:\n", quotient.degrees)
    print("  reduced walk matrix:\n", quotient.reduced.values)
    drift = np.max(np.abs(quotient.average.values @ walk.values
                          - quotient.reduced.values @ quotient.average.values))
    print("  averaging intertwines the walk, max drift:", drift)
    residual = residual_part(walk, quotient)
    print("  averaged residual:",
          np.max(np.abs(quotient.average.values @ residual.values)))
    print()


star = np.zeros((4, 4), dtype=int)
star[0, 1:] = 1
star[1:, 0] = 1
show("star on four vertices", star)

path = np.zeros((4, 4), dtype=int)
for v in range(3):
    path[v, v + 1] = path[v + 1, v] = 1
show("path on four vertices", path)

prism = np.zeros((6, 6), dtype=int)
for u, v in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3),
             (0, 3), (1, 4), (2, 5)]:
    prism[u, v] = prism[v, u] = 1
show("triangular prism (vertex-transitive)", prism)
