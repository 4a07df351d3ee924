"""Langevin transducer frequency-response models.

Two complementary routes to the plate-centre velocity response:

* a 1D transfer-matrix stack: lossy transmission-line segments chained
  from the back mass to the horn tip, piezo rings represented by the
  Mason three-port under voltage drive, terminated by the plate
  drive-point impedance;
* pole-zero-gain surrogates of the single-resonance and dual-resonance
  response shapes, evaluated exactly as written.

Also houses dual-resonance feature extraction, the design objective
functions and combination-resonance screening.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InfeasibleDesignError,
    NoDualResonanceError,
    ParameterDomainError,
)
from .linfield import EquivalenceRatio, piston_radiation_impedance
from .materials import Material, get_material
from .medium import Medium
from .radiator import ModeShape, PlateSpec

#: default frequency step for peak searches (Hz)
PEAK_GRID_STEP = 10.0
#: horn-end radius catalog (m)
HORN_RADIUS_CATALOG = (0.75e-3, 1.00e-3, 1.25e-3, 1.50e-3)
#: piezo stack radius catalog (m)
PIEZO_RADIUS_CATALOG = (7e-3, 9e-3, 11e-3, 13e-3)


class StackConfig(enum.Enum):
    """Fundamental-mode configuration of the transducer."""
    HALF = "half"   # half wavelength, single piezo stack
    FULL = "full"   # full wavelength, cascaded double stack


@dataclass(frozen=True)
class Segment:
    """One cylindrical section of the transducer stack.

    Piezo segments carry the material's 33-mode constants and are driven
    by the common voltage with polarity ``drive_sign``.
    """

    length: float
    radius: float
    material: Material
    is_piezo: bool = False
    drive_sign: float = 1.0

    def __post_init__(self):
        if self.length <= 0 or self.radius <= 0:
            raise ParameterDomainError("segment length and radius must be positive")
        if self.is_piezo and self.material.piezo is None:
            raise ParameterDomainError(
                f"segment material {self.material.name!r} has no piezo constants"
            )

    @property
    def area(self) -> float:
        return np.pi * self.radius ** 2

    def split(self, fraction: float = 0.5) -> tuple:
        """Two segments whose chain equals this one (composition check)."""
        if not 0.0 < fraction < 1.0:
            raise ParameterDomainError("split fraction must be in (0, 1)")
        return (replace(self, length=self.length * fraction),
                replace(self, length=self.length * (1.0 - fraction)))


@dataclass(frozen=True)
class TransducerSpec:
    """Ordered segment stack, back mass first, plate interface last."""

    config: StackConfig
    segments: tuple
    drive_voltage: float = 1.0

    def __post_init__(self):
        n_piezo = sum(1 for s in self.segments if s.is_piezo)
        want = 1 if self.config is StackConfig.HALF else 2
        if n_piezo != want:
            raise ParameterDomainError(
                f"{self.config.value} configuration needs {want} piezo stack(s), "
                f"got {n_piezo}"
            )

    @property
    def total_length(self) -> float:
        return float(sum(s.length for s in self.segments))

    @property
    def tip_radius(self) -> float:
        return self.segments[-1].radius


@dataclass
class Frf:
    """Complex plate-centre velocity over a frequency grid."""

    freqs: np.ndarray
    center_velocity: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float)
        v = np.asarray(self.center_velocity, dtype=complex)
        if f.ndim != 1 or f.shape != v.shape:
            raise ParameterDomainError("freqs and center_velocity must match 1-D")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ParameterDomainError("frequency grid must be strictly increasing")
        self.freqs = f
        self.center_velocity = v

    def interp(self, f) -> complex | np.ndarray:
        """Linear interpolation of the complex response."""
        re = np.interp(f, self.freqs, self.center_velocity.real)
        im = np.interp(f, self.freqs, self.center_velocity.imag)
        out = re + 1j * im
        return complex(out) if np.ndim(f) == 0 else out

    def scaled(self, s: float) -> "Frf":
        return Frf(self.freqs.copy(), self.center_velocity * s)


@dataclass(frozen=True)
class DrFeatures:
    """Dual-resonance descriptors of a velocity response.

    ``f_r1 < f_m < f_r2``: the two highest interior peaks and the local
    minimum between them; ``f_dist`` is the peak spacing.
    """

    f_r1: float
    f_r2: float
    v_r1: float
    v_r2: float
    f_m: float
    v_m: float

    def __post_init__(self):
        if not self.f_r1 < self.f_m < self.f_r2:
            raise ParameterDomainError("need f_r1 < f_m < f_r2")
        if self.v_m > min(self.v_r1, self.v_r2) * (1 + 1e-12):
            raise ParameterDomainError("inter-peak minimum exceeds a peak value")

    @property
    def f_dist(self) -> float:
        return self.f_r2 - self.f_r1


class PzgKind(enum.Enum):
    SR = "SR"
    DR = "DR"


def pzg_frf(kind: PzgKind, gain: float, f_r1: float, f_r2: float,
            f_anti: float | None, eta: float, freqs) -> Frf:
    """Pole-zero-gain velocity response of an SR or DR transducer.

    SR: v = i*w*K / (w_r2^2 (1+i*eta) - w^2)
    DR: v = i*w*K * (w_a^2 (1+i*eta) - w^2)
        / ((w_r1^2 (1+i*eta) - w^2) (w_r2^2 (1+i*eta) - w^2))

    with the anti-resonance w_a between the two poles.
    """
    if eta <= 0:
        raise ParameterDomainError("loss factor eta must be positive")
    freqs = np.asarray(freqs, dtype=float)
    w = 2.0 * np.pi * freqs
    if kind is PzgKind.SR:
        w2 = 2.0 * np.pi * f_r2
        v = 1j * w * gain / (w2 ** 2 * (1 + 1j * eta) - w ** 2)
        return Frf(freqs, v)
    if f_anti is None or not f_r1 < f_anti < f_r2:
        raise ParameterDomainError(
            "DR form needs f_r1 < f_anti < f_r2 (anti-resonance between poles)"
        )
    w1 = 2.0 * np.pi * f_r1
    w2 = 2.0 * np.pi * f_r2
    wa = 2.0 * np.pi * f_anti
    v = (1j * w * gain * (wa ** 2 * (1 + 1j * eta) - w ** 2)
         / ((w1 ** 2 * (1 + 1j * eta) - w ** 2)
            * (w2 ** 2 * (1 + 1j * eta) - w ** 2)))
    return Frf(freqs, v)


# ---------------------------------------------------------------------------
# Stack construction
# ---------------------------------------------------------------------------

def _default_materials() -> dict:
    return {"back": get_material("steel"), "front": get_material("aluminum"),
            "horn": get_material("aluminum"), "piezo": get_material("pzt")}


def build_stack(config: StackConfig, r_p: float, l_p: float, r_h: float,
                x, materials: dict | None = None, drive_voltage: float = 1.0,
                f_u0: float | None = None) -> TransducerSpec:
    """Assemble the segment stack of a half- or full-wavelength transducer.

    ``x`` holds the variable segment lengths: (back, front, horn) for the
    half-wavelength single-stack layout, (back, middle, front, horn) for
    the full-wavelength cascaded double stack.  The stepped horn is
    realized as two sections with a geometric-mean intermediate radius,
    ending at ``r_h``.  The piezo radius must stay inside its
    radial-wavelength band (lambda_r/8, lambda_r/4) when ``f_u0`` is
    given.
    """
    mats = dict(_default_materials())
    if materials:
        mats.update({k: get_material(v) for k, v in materials.items()})
    x = [float(v) for v in np.atleast_1d(x)]
    want = 3 if config is StackConfig.HALF else 4
    if len(x) != want:
        raise ParameterDomainError(
            f"{config.value} configuration takes {want} segment lengths, got {len(x)}"
        )
    if any(v <= 0 for v in x):
        raise ParameterDomainError("segment lengths must be positive")

    if f_u0 is not None:
        lam_r = mats["piezo"].radial_speed() / f_u0
        if not lam_r / 8.0 < r_p < lam_r / 4.0:
            raise InfeasibleDesignError(
                f"piezo radius {r_p:.4g} m outside the radial band "
                f"({lam_r / 8.0:.4g}, {lam_r / 4.0:.4g}) m at {f_u0:.4g} Hz"
            )

    r_mid = float(np.sqrt(r_p * r_h))  # geometric area schedule
    pz = mats["piezo"]

    def horn(length: float) -> list:
        return [Segment(length / 2.0, r_mid, mats["horn"]),
                Segment(length / 2.0, r_h, mats["horn"])]

    if config is StackConfig.HALF:
        segs = [
            Segment(x[0], r_p, mats["back"]),
            Segment(l_p, r_p, pz, is_piezo=True),
            Segment(x[1], r_p, mats["front"]),
            *horn(x[2]),
        ]
    else:
        segs = [
            Segment(x[0], r_p, mats["back"]),
            Segment(l_p, r_p, pz, is_piezo=True),
            Segment(x[1], r_p, mats["back"]),
            Segment(l_p, r_p, pz, is_piezo=True, drive_sign=-1.0),
            Segment(x[2], r_p, mats["front"]),
            *horn(x[3]),
        ]
    return TransducerSpec(config=config, segments=tuple(segs),
                          drive_voltage=drive_voltage)


def langevin_initial_lengths(f_u0: float, config: StackConfig,
                             l_p: float = 0.0,
                             materials: dict | None = None) -> tuple:
    """Initial variable lengths and bounds from the resonance condition.

    The classical half-wave (full-wave) condition allocates a total
    acoustic phase of pi (2*pi) along the stack at ``f_u0``; the phase
    remaining after the fixed piezo stack(s) is split evenly across the
    variable segments.  Bounds are 0.5x to 1.5x the initial lengths.
    """
    if f_u0 <= 0:
        raise ParameterDomainError("f_u0 must be positive")
    mats = dict(_default_materials())
    if materials:
        mats.update({k: get_material(v) for k, v in materials.items()})
    omega = 2.0 * np.pi * f_u0
    n_piezo = 1 if config is StackConfig.HALF else 2
    budget = np.pi if config is StackConfig.HALF else 2.0 * np.pi
    budget -= n_piezo * omega * l_p / mats["piezo"].rod_speed
    if budget <= 0:
        raise InfeasibleDesignError("piezo stack alone exceeds the resonance length")

    seg_mats = (["back", "front", "horn"] if config is StackConfig.HALF
                else ["back", "back", "front", "horn"])
    share = budget / len(seg_mats)
    x0 = np.array([share * mats[mname].rod_speed / omega for mname in seg_mats])
    return x0, (0.5 * x0, 1.5 * x0)


# ---------------------------------------------------------------------------
# Transfer-matrix chain
# ---------------------------------------------------------------------------

def _segment_chain(seg: Segment, omega: np.ndarray):
    """Chain matrix (and drive vector) of one segment over all frequencies.

    State convention: [F, v] with F the compressive force transmitted in
    +x and v the particle velocity; [F, v]_left = T [F, v]_right + s*V.
    Losses enter through the complex modulus E(1 + i*eta).
    """
    n = omega.size
    mat = seg.material
    eta = mat.loss_factor
    if not seg.is_piezo:
        c = mat.rod_speed * np.sqrt(1.0 + 1j * eta)
        k = omega / c
        zc = mat.density * c * seg.area
        kl = k * seg.length
        t = np.empty((n, 2, 2), dtype=complex)
        t[:, 0, 0] = np.cos(kl)
        t[:, 0, 1] = 1j * zc * np.sin(kl)
        t[:, 1, 0] = 1j * np.sin(kl) / zc
        t[:, 1, 1] = np.cos(kl)
        return t, np.zeros((n, 2), dtype=complex)

    pz = mat.piezo
    s33e = pz.s33_e * (1.0 - 1j * eta)
    eps_t = pz.eps33_s + pz.d33 ** 2 / s33e
    k33sq = pz.d33 ** 2 / (s33e * eps_t)
    s33d = s33e * (1.0 - k33sq)
    c = 1.0 / np.sqrt(mat.density * s33d)
    k = omega / c
    zc = mat.density * c * seg.area
    kl = k * seg.length
    c0 = pz.eps33_s * seg.area / seg.length
    n_ratio = seg.drive_sign * pz.d33 * seg.area / (s33e * seg.length)

    a11 = zc / (1j * np.tan(kl)) - n_ratio ** 2 / (1j * omega * c0)
    a12 = zc / (1j * np.sin(kl)) - n_ratio ** 2 / (1j * omega * c0)
    t = np.empty((n, 2, 2), dtype=complex)
    t[:, 0, 0] = a11 / a12
    t[:, 0, 1] = (a11 ** 2 - a12 ** 2) / a12
    t[:, 1, 0] = 1.0 / a12
    t[:, 1, 1] = a11 / a12
    s = np.empty((n, 2), dtype=complex)
    s[:, 0] = n_ratio * (1.0 - a11 / a12)
    s[:, 1] = -n_ratio / a12
    return t, s


def segment_matrix(seg: Segment, f) -> np.ndarray:
    """Chain matrix of a segment at frequency grid ``f`` (piezo included)."""
    omega = 2.0 * np.pi * np.atleast_1d(np.asarray(f, dtype=float))
    t, _ = _segment_chain(seg, omega)
    return t


def frf_transfer_matrix(spec: TransducerSpec, load, freqs) -> Frf:
    """Plate-interface velocity of the stack under voltage drive.

    The segment chains compose back-to-front; the back face is free
    (F = 0) and the front face feeds the load impedance (F = Z_L v).
    ``load`` may be a scalar, an array over ``freqs`` or a callable
    f -> Z.  Frequencies where the chain is numerically singular are
    flagged and filled by interpolation from their neighbours.
    """
    freqs = np.asarray(freqs, dtype=float)
    omega = 2.0 * np.pi * freqs
    if callable(load):
        z_load = np.asarray(load(freqs), dtype=complex)
    else:
        z_load = np.broadcast_to(np.asarray(load, dtype=complex), freqs.shape)

    t_tot = np.zeros((freqs.size, 2, 2), dtype=complex)
    t_tot[:, 0, 0] = 1.0
    t_tot[:, 1, 1] = 1.0
    s_tot = np.zeros((freqs.size, 2), dtype=complex)
    for seg in spec.segments:
        t_seg, s_seg = _segment_chain(seg, omega)
        s_tot = s_tot + np.einsum("nij,nj->ni", t_tot, s_seg)
        t_tot = np.einsum("nij,njk->nik", t_tot, t_seg)

    # 0 = F_back = (T00 Z_L + T01) v_front + s0 * V
    denom = t_tot[:, 0, 0] * z_load + t_tot[:, 0, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        v = -s_tot[:, 0] / denom * spec.drive_voltage
    bad = ~np.isfinite(v)
    if np.any(bad):
        good = ~bad
        if not np.any(good):
            raise ParameterDomainError("transfer-matrix chain singular everywhere")
        v = v.copy()
        v[bad] = (np.interp(freqs[bad], freqs[good], v[good].real)
                  + 1j * np.interp(freqs[bad], freqs[good], v[good].imag))
    return Frf(freqs, v)


def plate_load_impedance(plate: PlateSpec, mode: ModeShape, er: EquivalenceRatio,
                         medium: Medium, freqs) -> np.ndarray:
    """Single-mode drive-point impedance of the plate at its centre.

    Z(w) = i*w*m_eff + k_eff (1+i*eta_s)/(i*w) + |ER|^2 * Z_rad(piston),
    with the modal mass referred to the unit-normalized centre
    deflection and the piston radiation impedance referred to centre
    velocity through the squared linear equivalence factor.
    """
    if not np.isclose(mode.radius_a, plate.radius_a):
        raise ParameterDomainError("mode and plate radii disagree")
    freqs = np.asarray(freqs, dtype=float)
    omega = 2.0 * np.pi * freqs
    r, w = mode.radii, mode.deflection
    m_eff = plate.density * plate.thickness * 2.0 * np.pi * np.trapezoid(w * w * r, r)
    w_m = 2.0 * np.pi * mode.natural_frequency
    k_eff = m_eff * w_m ** 2
    er_sq = er.linear ** 2
    z_rad = np.array([piston_radiation_impedance(plate.radius_a, f, medium)
                      for f in np.atleast_1d(freqs)])
    z = (1j * omega * m_eff + k_eff * (1.0 + 1j * plate.loss_factor) / (1j * omega)
         + er_sq * z_rad)
    return z


# ---------------------------------------------------------------------------
# Feature extraction, objectives, screening
# ---------------------------------------------------------------------------

def _parabolic_peak(x: np.ndarray, y: np.ndarray, i: int) -> tuple:
    """Sub-grid vertex of the parabola through samples i-1, i, i+1.

    Coordinates are centred on the middle sample before solving, which
    keeps the vertex free of catastrophic cancellation at large x.
    """
    if i == 0 or i == x.size - 1:
        return float(x[i]), float(y[i])
    h0 = x[i - 1] - x[i]
    h2 = x[i + 1] - x[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = h0 * h2 * (h0 - h2)
    a = (h2 * (y0 - y1) - h0 * (y2 - y1)) / denom
    if a == 0:
        return float(x[i]), float(y1)
    b = (h0 ** 2 * (y2 - y1) - h2 ** 2 * (y0 - y1)) / denom
    tv = -b / (2.0 * a)
    if not h0 <= tv <= h2:
        return float(x[i]), float(y1)
    return float(x[i] + tv), float(y1 + a * tv ** 2 + b * tv)


def extract_dr_features(frf: Frf) -> DrFeatures:
    """Two highest interior peaks of |v| and the local minimum between them.

    Peaks are refined by the parabola through the three samples around
    each maximum; ties between equal peaks break toward lower frequency.
    Raises :class:`NoDualResonanceError` when fewer than two interior
    local maxima exist.
    """
    f = frf.freqs
    mag = np.abs(frf.center_velocity)
    if f.size < 5:
        raise NoDualResonanceError("frequency grid too short for peak search")
    interior = np.flatnonzero(
        (mag[1:-1] >= mag[:-2]) & (mag[1:-1] > mag[2:])
    ) + 1
    if interior.size < 2:
        raise NoDualResonanceError(
            f"found {interior.size} interior peak(s); dual resonance needs two"
        )
    # two largest by magnitude, stable toward lower frequency on ties
    order = np.argsort(mag[interior], kind="stable")[::-1]
    picked = sorted(interior[order[:2]])
    i1, i2 = int(picked[0]), int(picked[1])
    f_r1, v_r1 = _parabolic_peak(f, mag, i1)
    f_r2, v_r2 = _parabolic_peak(f, mag, i2)
    im = i1 + int(np.argmin(mag[i1:i2 + 1]))
    f_m, v_m = _parabolic_peak(f, -mag, im)
    v_m = -v_m
    v_m = min(v_m, v_r1, v_r2)
    if not f_r1 < f_m < f_r2:
        f_m = float(f[im])
        v_m = float(mag[im])
    return DrFeatures(f_r1=f_r1, f_r2=f_r2, v_r1=v_r1, v_r2=v_r2,
                      f_m=f_m, v_m=v_m)


def objectives(features: DrFeatures) -> tuple:
    """Design objectives of a dual-resonance response.

    F1 = -(v_r1 * v_r2 * v_m)^(1/3), the negative geometric mean of the
    two peak velocities and the inter-peak minimum; F2 = f_r2 - f_r1.
    Both are minimized.
    """
    if min(features.v_r1, features.v_r2, features.v_m) <= 0:
        raise ParameterDomainError("objective velocities must be positive")
    f1 = -float(np.cbrt(features.v_r1 * features.v_r2 * features.v_m))
    f2 = float(features.f_dist)
    return f1, f2


def cr_screen(modal_freqs, audio_band: tuple, tol: float,
              f_a_grid=None) -> list:
    """Audio frequencies at combination-resonance risk.

    Flags frequencies within ``tol`` of any structural modal frequency.
    With ``f_a_grid`` given, returns the flagged grid entries; otherwise
    returns the in-band modal frequencies themselves.
    """
    if tol <= 0:
        raise ParameterDomainError("tolerance must be positive")
    lo, hi = audio_band
    if not lo < hi:
        raise ParameterDomainError("audio band must satisfy lo < hi")
    modes = np.asarray(sorted(float(f) for f in modal_freqs))
    if f_a_grid is None:
        return [f for f in modes if lo <= f <= hi]
    grid = np.asarray(f_a_grid, dtype=float)
    flagged = []
    for f in grid:
        if lo <= f <= hi and modes.size and np.min(np.abs(modes - f)) <= tol:
            flagged.append(float(f))
    return flagged
