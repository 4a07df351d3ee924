"""Ultrasonic beam patterns: stepped plate against the matching piston.

Both radiators share the aperture; the plate's centre-weighted velocity
taper widens the main lobe slightly and sets the sidelobe structure.
"""

import numpy as np

from sppal import linfield, radiator
from sppal.medium import build_medium

air = build_medium()
f0, d_uc = 60e3, 0.45
plate = radiator.size_plate_for(f0, d_uc, 8, "aluminum", air)
mode = radiator.plate_mode_shape(plate)
sp = radiator.stepped_profile(mode, 1.0, n_samples=1025)
rp = radiator.piston_profile(radiator.PistonSpec(plate.radius_a, 1.0), 1025)

theta = np.linspace(0.0, 15.0, 151)
bp_sp = linfield.beam_pattern(sp, air, f0, 1.0, theta)
bp_rp = linfield.beam_pattern(rp, air, f0, 1.0, theta)


def quarter_power_width(th, rel):
    j = int(np.flatnonzero(rel <= -6.0)[0])
    half = np.interp(-6.0, [rel[j], rel[j - 1]], [th[j], th[j - 1]])
    return 2.0 * half


print(f"quarter-power beamwidth at 1 m, {f0/1e3:.0f} kHz:")
print(f"  stepped plate: {quarter_power_width(theta, bp_sp.spl_rel):.2f} deg")
print(f"  rigid piston:  {quarter_power_width(theta, bp_rp.spl_rel):.2f} deg")

print("\ntheta [deg]   SP [dB re max]   RP [dB re max]")
for j in range(0, theta.size, 15):
    print(f"{theta[j]:10.1f}   {bp_sp.spl_rel[j]:13.1f}   {bp_rp.spl_rel[j]:13.1f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(theta, bp_sp.spl_rel, label="stepped plate")
    ax.plot(theta, bp_rp.spl_rel, ":", label="piston")
    ax.set_ylim(-45, 2)
    ax.set_xlabel("theta [deg]")
    ax.set_ylabel("level [dB re max]")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo05_beam_patterns.png", dpi=120)
    print("\nwrote demo05_beam_patterns.png")
except ImportError:
    pass
