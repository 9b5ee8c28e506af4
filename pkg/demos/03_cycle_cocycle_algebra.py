"""The cycle/co-cycle geometry of majority graphs.

A majority graph is a vector over the alternative pairs.  Unit triangles
through a fixed alternative span the cycle space, unit out-stars span its
orthogonal complement, and the projection has a one-line closed form.
"""

import numpy as np

from votelab import (
    Digraph,
    Profile,
    cocycle,
    cycle_basis_coeffs,
    cycle_to_triangles,
    dot,
    edge_gadget_graphs,
    eulerian_cycle_decomposition,
    orthogonal_decompose,
    three_cycle,
    wmg,
)
from votelab.graph_algebra import edge_gadget_wmg_sum

m = 3
g = wmg(Profile.from_rankings([(0, 1, 2)]))
print("margins of a single ballot:")
print(g.matrix)

g_cyc, g_co = orthogonal_decompose(g)
print("\nstar part (projection onto out-stars):")
print(g_co.matrix)
print("cyclic residue (a uniform 1/3 triangle):")
print(g_cyc.matrix)
print("parts are orthogonal:", abs(dot(g_cyc, g_co)) < 1e-12)
print("residue is orthogonal to every star:",
      all(abs(dot(g_cyc, cocycle(a, m))) < 1e-12 for a in range(m)))

# Dimensions: triangles through alternative 0 span C(m-1,2); stars span m-1.
for mm in (4, 6):
    tri = [three_cycle(0, i, j, mm).upper() for i in range(1, mm) for j in range(i + 1, mm)]
    co = [cocycle(a, mm).upper() for a in range(mm)]
    print(f"\nm={mm}: triangle span rank {np.linalg.matrix_rank(np.stack(tri))}"
          f" (expect {(mm - 1) * (mm - 2) // 2}),"
          f" star span rank {np.linalg.matrix_rank(np.stack(co))} (expect {mm - 1})")

# Any cycle-space graph reconstructs from triangles through alternative 0.
target = three_cycle(1, 2, 3, 4)  # avoids alternative 0 entirely
lam = cycle_basis_coeffs(target)
recon = sum(
    (three_cycle(0, i, j, 4) * w for (i, j), w in lam.items()),
    start=three_cycle(0, 1, 2, 4) * 0.0,
)
print("\ntriangle (1,2,3) rebuilt from triangles through 0:", recon.allclose(target))

# Long cycles fan into triangles whose graphs sum back to the cycle.
square = [0, 1, 2, 3]
print("4-cycle fans into:", cycle_to_triangles(square))

# Balanced graphs split into edge-disjoint simple cycles.
fig8 = Digraph.from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
print("figure-eight splits into:", eulerian_cycle_decomposition(fig8))

# A weight-m single edge out of unweighted triangles and stars.
tris, centers = edge_gadget_graphs(1, 0, 4)
print(f"\nedge gadget at m=4: triangles {tris}, star centers {centers}")
print("their sum (weight 4 on 1 -> 0 only):")
print(edge_gadget_wmg_sum(1, 0, 4).matrix)
