"""
A small end-to-end run
======================

Grow all three models over the size grid with a handful of realizations,
then look at which measurements increase (A), decrease (B) or do neither
(C) as the networks grow. Output files land in ./demo_out.
"""
import sys

from netperturb import MEASUREMENTS, dendrogram_to_newick, run_pipeline, validate_config

cfg = validate_config("""
profile = desk
experiments = SIZE
realizations = 20
seed = 3
""")
out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
run = run_pipeline(cfg, out)

cells = list(run.cells)
print(f"{'measurement':<22}" + "".join(f"{m + '/' + e:>12}" for m, e in cells))
for name in MEASUREMENTS:
    print(f"{name:<22}" + "".join(f"{run.cells[c].labels[name]:>12}" for c in cells))

# measurements that move together end up in the same subtree
geo = run.cells[("GEO", "SIZE")]
print()
print("GEO/SIZE dendrogram:")
print(dendrogram_to_newick(geo.dendrogram))
print("files written to", out)
