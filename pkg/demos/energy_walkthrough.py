"""Quasi-local energy of distant spheres, three ways.

The closed form, the assembled expansion and a fully numeric route (geometry
sampling, Richardson fitting, embedding solve) should give the same leading
coefficient d^2 E. Mass loss makes it positive; mass gain makes it negative.

    python demos/energy_walkthrough.py
"""

from vqlm import build_grid, preset
from vqlm.energy import energy_numeric_path
from vqlm.loopinv import invariant

grid = build_grid(128)
profiles = [
    preset("affine", m0=1, a=0.5),
    preset("tanh_step", m0=1, a=0.5, lam=2),
    preset("tanh_step", m0=1, a=-0.5, lam=2),
    preset("constant", m0=2),
]

print(f"{'profile':<34} {'closed':>12} {'assembled':>12} {'numeric':>12}  dec")
for p in profiles:
    rep = energy_numeric_path(p, grid=grid)
    lc = rep.leading_coefficient
    print(f"{p.spec:<34} {lc['closed']:12.6f} {lc['lemma']:12.6f} {lc['numeric']:12.6f}  {rep.dec_flag}")

print("\nLoop invariant for affine mass aspect with reference mass 1")
p = preset("affine", m0=1, a=0.5, m_ref=1)
for c in (-0.8, -0.5, -0.2, 0.2, 0.5, 0.8):
    s = invariant(p, c)
    print(f"  c={c:+.1f}  cap integral {s.numeric:.12f}  boundary form {s.closed:.12f}")
