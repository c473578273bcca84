"""Watch the sphere geometry approach flat space as the sphere moves out.

Samples the surface at growing distances d, then recovers the 1/d and 1/d^2
coefficients by Richardson fitting and compares them with closed forms.

    python demos/geometry_walkthrough.py
"""

import numpy as np

from vqlm import build_grid, preset, surface_geometry
from vqlm.closedform import area_coefficients, mean_curvature_coefficients
from vqlm.seriesx import richardson_fit

grid = build_grid(128)
profile = preset("tanh_step", m0=1, a=0.5, lam=2)
schedule = (250.0, 500.0, 1000.0, 2000.0)

print(f"profile {profile.spec}")
print(f"{'d':>8} {'max|areaRatio-1|':>18} {'max|breve_h-2|':>16}")
geoms = [surface_geometry(profile, d, grid) for d in schedule]
for g in geoms:
    print(f"{g.d:8.0f} {np.max(np.abs(g.areaRatio - 1)):18.3e} {np.max(np.abs(g.breve_h - 2)):16.3e}")

V1, V2 = area_coefficients(profile, grid)
b1, b2 = mean_curvature_coefficients(profile, grid)
area = richardson_fit([(g.d, g.areaRatio) for g in geoms])
mean = richardson_fit([(g.d, g.breve_h) for g in geoms])

print("\nRichardson fit against closed forms (sup over nodes)")
for label, got, ref in [("area a1", area.a1, V1), ("area a2", area.a2, V2),
                        ("breve_h a1", mean.a1, b1), ("breve_h a2", mean.a2, b2)]:
    got = np.asarray(getattr(got, "values", got))
    print(f"  {label:<11} error {np.max(np.abs(got - ref.values)):.2e}   scale {np.max(np.abs(ref.values)):.3f}")
