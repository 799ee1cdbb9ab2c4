"""Find four points on a deformed sphere with equal sides and equal diagonals.

Run with ``python3 demos/tetrahedra.py``.
"""

import numpy as np

from d8tetra import geometry as geo

embeddings = {
    "round sphere": geo.round_sphere(1.0),
    "ellipsoid 1 x 1.3 x 0.7": geo.ellipsoid(1.0, 1.3, 0.7),
    "bumpy sphere": geo.radial_harmonic({(2, 1): 0.15, (3, 2): 0.1}),
}

for name, emb in embeddings.items():
    rep = geo.solve(emb, starts=32, seed=42)
    d = rep.distances
    print(f"{name}: certified={rep.certified} residual={rep.residual:.1e} ({rep.runtime:.1f}s)")
    print(f"  sides     {d['d12']:.9f} {d['d23']:.9f} {d['d34']:.9f} {d['d14']:.9f}")
    print(f"  diagonals {d['d13']:.9f} {d['d24']:.9f} (diagonal / side = {d['d13'] / d['d12']:.6f})")
    # Pushing the diagonals apart tends to flatten the witness into a square (diagonal = side * sqrt 2).
    pts = emb.evaluate(np.array(rep.config))
    print("  image points:\n" + "\n".join("    " + " ".join(f"{x:+.6f}" for x in p) for p in pts))

# The same search on plane curves finds inscribed squares.
for name, curve in {"ellipse 1 x 0.6": geo.ellipse(1.0, 0.6), "five-pointed star": geo.star(0.2, 5)}.items():
    rep = geo.square_peg_solve(curve, starts=16, seed=42)
    print(f"{name}: square with side {rep.distances['d12']:.9f}, spread {geo.side_spread(rep):.1e}")
