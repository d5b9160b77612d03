"""
The hexagonal cell layout as an Eisenstein-lattice graph
========================================================

Cells sit on the lattice a + b*omega.  Neighbouring cells interfere, and
once receivers decode left to right and top down, every edge keeps only one
direction of interference.
"""

from cellia import build_graph, cardinality_formulas, inactive_set_and_clusters
from cellia.lattice import decode_key

# A small region: r = 2 holds 23 cells.
g = build_graph(2)
print("cells:", len(g.vertices), " edges:", len(g.undirected_edges), " triangles:", len(g.triangles))
print("closed forms (|V|, |T|, |V_ex| bound):", cardinality_formulas(2))

# Draw the cells line by line, marking boundary cells with 'x'.
for b, line in g.lines.items():
    pad = " " * (2 * (g.r + 1) + line[0].re2)
    cells = " ".join("x" if v in g.external_vertices else "o" for v in line)
    print(f"line {b:+d}: {pad}{cells}")

# Each receiver still hears its right neighbour and the two cells below it.
v = next(v for v in g.vertices if len(g.interferers[v]) == 3)
print(f"\nreceiver {v!r} hears {g.interferers[v]}")

# Decoding order: the first few cells, and a sanity check that every
# directed edge points at a cell decoded earlier.
order = sorted(g.vertices, key=decode_key)
print("first decoded:", order[:5])
assert all(decode_key(rx) < decode_key(tx) for tx, rx in g.directed_edges)

# Silence one coset of 2*Z(omega); what remains splits into six-edge clusters.
part = inactive_set_and_clusters(build_graph(3))
full = [z for z in part.clusters if z not in part.partial]
print(f"\nr=3: {len(part.inactive)} silent cells, {len(full)} full clusters, {len(part.partial)} partial")
z = full[0]
print("cluster", z, "roles:", part.roles[z])
print("edges:", part.clusters[z])
