"""Cylinder certificates for the order structure of boundary classes.

For boundary hitters a, b of a shift, the region of points whose a-translate
is inside the window but whose b-translate is outside witnesses that a and b
behave differently.  In the base window all hitters look alike near the
shift, so these regions are certified empty; in a sector window the region is
nonempty exactly when the accepted hitter sits in a strictly higher class.
"""

from odowin import presets
from odowin.fibers import boundary_hitters_exact, critical_point, t_region
from odowin.windows import build_k

base = presets.build_preset_window("z-fiber")
xi = critical_point(base)
hitters = [g for g, _ in boundary_hitters_exact(base, xi)]

a, b = hitters[0], hitters[1]
print(f"== base window: hitters {a} and {b} are locally indistinguishable ==")
for eps in (2, 3, 4):
    r = t_region(base, [a], [b], xi, eps)
    print(f"  ball depth {eps}: certificates {len(r.certificates)}, "
          f"excluded {r.excluded}, unresolved {r.undecided} "
          f"(all mirrored: {r.mismatched_undecided == 0})")

win = build_k(base, 2, sector_level=1)
xi2 = critical_point(win)
by_sector: dict[int, list] = {}
for g, s in boundary_hitters_exact(win, xi2):
    by_sector.setdefault(s, []).append(g)
low = min(by_sector[1], key=abs)
high = min(by_sector[2], key=abs)
print(f"\n== sector window (k=2): S1 hitter {low} vs S2 hitter {high} ==")
for eps in (2, 3):
    fw = t_region(win, [high], [low], xi2, eps)
    bw = t_region(win, [low], [high], xi2, eps)
    print(f"  ball depth {eps}: accept-S2/reject-S1 certificates {len(fw.certificates)}; "
          f"reversed direction {len(bw.certificates)} (empty: {bw.empty_certified})")
print("\nThe asymmetry is the strict order S1 < S2: an array in the fiber that")
print("takes value 1 on a low-class hitter must take value 1 on every higher one.")
