"""
Measuring one network of each model
===================================

Generate an ER, a BA and a GEO network with N=100 and target <k>=5.7, then
print the fourteen measurements side by side.
"""
from netperturb import MEASUREMENTS, generate, measure_all

graphs = {m: generate(m, 100, 5.7, seed=7) for m in ("ER", "BA", "GEO")}
reports = {m: measure_all(g) for m, g in graphs.items()}

print(f"{'measurement':<22}" + "".join(f"{m:>10}" for m in graphs))
for name in MEASUREMENTS:
    print(f"{name:<22}" + "".join(f"{reports[m][name].value:10.4f}" for m in graphs))

for m, g in graphs.items():
    print(m, "edges:", g.num_edges)
