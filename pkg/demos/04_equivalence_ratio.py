"""Stepped-plate / rigid-piston equivalence ratio.

The ER is the axial SPL offset at the critical distance between the
stepped plate and a piston of the same radius driven at the plate's
centre velocity; it converts plate centre velocities into effective
piston velocities for the audio pipeline.
"""

import numpy as np

from sppal import linfield, radiator
from sppal.medium import build_medium

air = build_medium()
d_uc, f0 = 0.45, 60e3

print("mode   thickness [mm]   ER [dB]")
for mode_m in (4, 5, 6, 7, 8):
    plate = radiator.size_plate_for(f0, d_uc, mode_m, "aluminum", air)
    mode = radiator.plate_mode_shape(plate)
    prof = radiator.stepped_profile(mode, 1.0, n_samples=1025)
    er = linfield.equivalence_ratio(prof, air, f0, d_uc)
    print(f"{mode_m:4d}   {plate.thickness*1e3:14.3f}   {er.er_db:7.2f}")

plate8 = radiator.size_plate_for(f0, d_uc, 8, "aluminum", air)
prof8 = radiator.stepped_profile(radiator.plate_mode_shape(plate8), 1.0,
                                 n_samples=1025)
print("\nER across the lower-sideband band (mode 8):")
for f in np.linspace(f0 - 10e3, f0, 6):
    er = linfield.equivalence_ratio(prof8, air, f, d_uc)
    print(f"  {f/1e3:5.1f} kHz: {er.er_db:6.2f} dB")

print("\nER consistency along the axis (even mode):")
v0 = prof8.center_velocity
ref = radiator.piston_profile(radiator.PistonSpec(prof8.radius_a, v0), 1025)
for d in np.linspace(d_uc, 3 * d_uc, 5):
    p_sp = linfield.rayleigh_pressure(prof8, air, f0, linfield.FieldPoint(0, d))
    p_rp = linfield.rayleigh_pressure(ref, air, f0, linfield.FieldPoint(0, d))
    print(f"  z = {d:.2f} m: {20*np.log10(abs(p_sp)/abs(p_rp)):6.2f} dB")
