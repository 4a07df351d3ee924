"""On-axis field of a baffled piston and the critical-distance relation.

The aperture is sized so the last on-axis maximum (the ultrasonic
critical distance) lands at 0.45 m for a 60 kHz drive; the quadrature
engine is compared against the closed-form solution along the axis.
"""

import numpy as np

from sppal import linfield, radiator
from sppal.medium import build_medium

air = build_medium()
f = 60e3
d_uc = 0.45
a = radiator.aperture_for_cd(d_uc, f, air)
print(f"aperture radius for D_uc = {d_uc} m at {f/1e3:.0f} kHz: a = {a*1e3:.2f} mm")
print(f"round trip z1 = {radiator.first_local_max(a, f, air):.4f} m")

spec = radiator.PistonSpec(a, 0.1)
profile = radiator.piston_profile(spec, radiator.radial_sample_count(a, f, air))
z = np.linspace(0.05, 1.5, 120)
curve = linfield.propagation_curve(profile, air, f, z)
closed = linfield.axial_piston_pressure(spec, air, f, z)

spl = curve.spl
peaks = np.flatnonzero((spl[1:-1] >= spl[:-2]) & (spl[1:-1] > spl[2:])) + 1
print(f"last on-axis maximum at z = {z[peaks[-1]]:.3f} m "
      f"(critical-distance design target {d_uc} m)")
print(f"max |quadrature - closed form| = "
      f"{np.max(np.abs(spl - linfield.spl_db(closed))):.4f} dB")

print("\n  z [m]   SPL [dB]")
for j in range(0, z.size, 12):
    print(f"  {z[j]:5.2f}   {curve.spl[j]:7.2f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(z, curve.spl, label="Rayleigh quadrature")
    ax.plot(z, linfield.spl_db(closed), ":", label="closed form")
    ax.axvline(d_uc, color="k", lw=0.5)
    ax.set_xlabel("z [m]")
    ax.set_ylabel("SPL [dB re 20 uPa]")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo02_piston_nearfield.png", dpi=120)
    print("\nwrote demo02_piston_nearfield.png")
except ImportError:
    pass
