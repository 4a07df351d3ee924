"""Atmospheric absorption across the ultrasonic band.

Shows how the pure-tone attenuation grows with frequency for the
reference ambient state and how strongly it reacts to humidity; the
absorption length 1/alpha is what ultimately truncates the virtual
source column of a parametric array.
"""

import numpy as np

from sppal.medium import absorption_coeff, absorption_coeff_db, build_medium

air = build_medium(temperature=20.0, relative_humidity=0.70, pressure=101.325)
print(f"sound speed {air.sound_speed:.1f} m/s, density {air.density:.3f} kg/m^3")
print()
print("f [kHz]   alpha [dB/m]   alpha [Np/m]   1/alpha [m]")
for f in (1e3, 5e3, 10e3, 20e3, 40e3, 60e3, 75e3, 90e3, 150e3):
    a_db = absorption_coeff_db(air, f)
    a_np = absorption_coeff(air, f)
    print(f"{f/1e3:7.0f}   {a_db:12.4f}   {a_np:12.5f}   {1.0/a_np:11.1f}")

print()
print("humidity sensitivity at 60 kHz:")
for rh in (0.2, 0.4, 0.6, 0.8, 1.0):
    m = build_medium(relative_humidity=rh)
    print(f"  RH {rh:.0%}: {absorption_coeff_db(m, 60e3):.3f} dB/m")
