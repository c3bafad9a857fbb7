"""Cut symbolic arrays out of windows: a 0-1 sequence and a planar image.

The array value at a position g is 1 exactly when the embedded point of g
lands in the window.  With the identity shift every position resolves (the
window boundary misses all embedded points); shifting by a boundary point
leaves genuinely undecided positions, which the planar writer renders gray.
"""

from pathlib import Path

from odowin import emit_patch, patch_pgm, presets
from odowin.fibers import critical_point

print("== a one-dimensional Toeplitz-style sequence ==")
win = presets.build_preset_window("z-irregular")
patch = emit_patch(win, patch_level=2)
row = "".join(str(patch.values[g]) for g in patch.positions[:128])
print(f"  first 128 values (of {len(patch.positions)}):")
for i in range(0, 128, 64):
    print("   ", row[i : i + 64])
print("  undecided positions:", len(patch.undecided()))

print("\n== a planar model set, rendered ==")
w2 = presets.build_preset_window("z2")
level = w2.cap
img = patch_pgm(w2, emit_patch(w2, patch_level=level), level)
out = Path(__file__).with_name("plane_identity.pgm")
out.write_bytes(img)
print(f"  wrote {out.name} ({w2.ds.modulus(level)}x{w2.ds.modulus(level)}, identity shift)")

xi = critical_point(w2)
img2 = patch_pgm(w2, emit_patch(w2, xi, patch_level=level), level)
out2 = Path(__file__).with_name("plane_boundary_shift.pgm")
out2.write_bytes(img2)
undecided = len(emit_patch(w2, xi, patch_level=level).undecided())
print(f"  wrote {out2.name} (boundary shift; {undecided} undecided pixel(s) in gray)")
