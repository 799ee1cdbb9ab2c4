"""Walk through the Z4 index computation for four points on a sphere.

Run with ``python3 demos/index_chain.py``.
"""

from d8tetra.cyclic_cohomology import cohomology
from d8tetra.index_ring import contains, no_map_verdict
from d8tetra.pair_homology import dual_cohomology, identify_module, relative_table, standard_candidates
from d8tetra.rep_chern import decompose, sphere_index, test_rep_u4xu2
from d8tetra.spectral import default_ledger, e2_for_case, edge_index, page_to_ascii, run_ledger
from d8tetra.zg_modules import named_module

# Group cohomology of Z4 with a few coefficient modules.
for name in ("trivial", "regular", "M", "N"):
    groups = cohomology(named_module(name), 6).as_list()
    print(f"H^*(Z4; {name:7s}) =", ", ".join(str(g) for g in groups))

# Cohomology of the configuration space, via duality with the relative homology of the pair.
cands = standard_candidates()
dual = dual_cohomology(relative_table(2))
print()
for degree, module in dual.items():
    print(f"H^{degree} of the configuration space: rank {module.rank}, {identify_module(module, cands).name}")

# The E2 page of the Serre spectral sequence and the page after the ledger has run.
e2 = e2_for_case("sphere-z")
print()
print(page_to_ascii(e2, 8))
final = run_ledger(e2, default_ledger("sphere-z"))
print()
print(page_to_ascii(final, 8))

# The index is the kernel of the edge map into the bottom row.
index = edge_index(final, bound=12)
print("\nindex of the configuration space:", index)

# The target sphere splits into complex lines, and its index is generated by the top Chern class.
rep = decompose(test_rep_u4xu2())
target = sphere_index(rep)
print("target representation:", rep)
print("index of its unit sphere:", target)
print("2U^2 lies in the domain index:", contains(index, "2U^2"))
print("verdict:", no_map_verdict(index, target).value)
