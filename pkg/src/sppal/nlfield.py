"""Quasilinear second-order (audio) field solver.

The difference-frequency field of two primary ultrasonic beams follows
from the Westervelt equation under the successive-approximation
(quasilinear) scheme: the primaries act as a distributed virtual source

    q(r') = beta * w_a^2 / (rho0 * c0^4) * p2(r') * conj(p1(r'))

integrated against the damped free-space Green's function
exp(-(alpha_a + i k_a) R) / (4 pi R).  With the exp(+iwt) convention and
outgoing primaries exp(-ikR), the carrier (f2) enters unconjugated and
the sideband (f1) conjugated; this keeps the source phase matched to
the outgoing audio wave (the resulting audio amplitude is linear in the
carrier velocity and conjugate-linear in the sideband velocity).

The volume integral exploits axisymmetry: primaries are evaluated once
on an (r', z') quadrature grid (dense near the source, geometrically
stretched beyond the collimation zone) and the azimuthal part of the
Green's function is handled analytically on axis or by adaptive
quadrature off axis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryPeakWarning,
    NumericalFailureError,
    ParameterDomainError,
    TruncationTailWarning,
)
from .linfield import (
    FieldCurve,
    FieldPoint,
    _gauss_legendre,
    axial_piston_pressure,
    pressure_grid,
    spl_db,
)
from .medium import Medium, absorption_coeff
from .radiator import PistonSpec, SourceKind, SourceProfile

_MAX_GREEN_ORDER = 512


def lsb_am_pair(f_carrier: float, f_audio: float) -> tuple:
    """Lower-sideband AM frequency placement: (f_carrier - f_audio, f_carrier)."""
    if not 0.0 < f_audio < f_carrier:
        raise ParameterDomainError(
            f"need 0 < f_audio < f_carrier, got ({f_carrier}, {f_audio})"
        )
    return (f_carrier - f_audio, f_carrier)


@dataclass(frozen=True)
class PrimaryPair:
    """Two primary beams radiated from one aperture.

    ``f_u1`` is the (lower) sideband, ``f_u2`` the carrier; the audio
    frequency is their difference.
    """

    f_u1: float
    f_u2: float
    profile_1: SourceProfile
    profile_2: SourceProfile

    def __post_init__(self):
        if not 0.0 < self.f_u1 < self.f_u2:
            raise ParameterDomainError("primary pair needs f_u2 > f_u1 > 0")
        if not np.isclose(self.profile_1.radius_a, self.profile_2.radius_a):
            raise ParameterDomainError("primary profiles must share one aperture")

    @property
    def f_a(self) -> float:
        return self.f_u2 - self.f_u1

    @property
    def radius_a(self) -> float:
        return self.profile_1.radius_a


@dataclass(frozen=True)
class AudioCd:
    """Audio critical distance: location and level of the on-axis maximum."""

    distance: float
    spl: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ParameterDomainError("audio critical distance must be positive")


@dataclass(frozen=True)
class SolverSettings:
    """Quadrature controls for the virtual-source volume integral.

    ``ppw_axial``/``ppw_radial``: grid points per primary wavelength in
    the collimated near zone; ``audio_ppw``: cap on far-zone axial steps
    in audio wavelengths; ``truncation_db``: the axial domain ends where
    the primary product has fallen this far below its maximum;
    ``radial_factor``: radial extent in beam radii.
    """

    ppw_axial: float = 12.0
    ppw_radial: float = 10.0
    audio_ppw: float = 24.0
    # the product's interference beat reaches ~2 k a r'/z^2 at the beam
    # edge (r' ~ a), twice the on-axis rate, hence the factor
    beat_safety: float = 2.6
    truncation_db: float = 60.0
    radial_factor: float = 4.0
    stretch: float = 1.02
    z_max_cap: float = 30.0
    tail_warn_fraction: float = 0.01
    refine_db: float = 0.05
    include_evanescent: bool = True


@dataclass
class VolumeGrid:
    """Quadrature nodes and weights for the axisymmetric virtual-source volume.

    ``weight(z_i, r_j)`` is ``wz[i] * wr[j] * r[j]``; the azimuthal 2*pi
    (on axis) or the azimuthal kernel (off axis) is applied by the
    solver.
    """

    z_nodes: np.ndarray
    r_nodes: np.ndarray
    wz: np.ndarray
    wr: np.ndarray
    truncation_db: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("z_nodes", "r_nodes", "wz", "wr"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.wz < 0) or np.any(self.wr < 0):
            raise ParameterDomainError("volume grid weights must be non-negative")
        if self.z_nodes.size != self.wz.size or self.r_nodes.size != self.wr.size:
            raise ParameterDomainError("node and weight arrays must align")

    @property
    def n_cells(self) -> int:
        return self.z_nodes.size * self.r_nodes.size


def _trapz_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    if x.size > 1:
        dx = np.diff(x)
        w[:-1] += 0.5 * dx
        w[1:] += 0.5 * dx
    return w


def _quad_weights(x: np.ndarray) -> np.ndarray:
    """Composite Simpson weights on a (possibly non-uniform) grid.

    Integrates the quadratic through consecutive node triples; needs the
    spacing ratio of adjacent intervals below 2 to keep weights
    positive, which the grid builders guarantee.  Falls back to a
    trapezoid panel at the end for an odd interval count.
    """
    n = x.size
    if n < 3:
        return _trapz_weights(x)
    w = np.zeros_like(x)
    i = 0
    while i + 2 < n or (i + 2 == n):
        if i + 2 > n - 1:
            break
        h1 = x[i + 1] - x[i]
        h2 = x[i + 2] - x[i + 1]
        big_h = h1 + h2
        w[i] += big_h * (2.0 * h1 - h2) / (6.0 * h1)
        w[i + 1] += big_h ** 3 / (6.0 * h1 * h2)
        w[i + 2] += big_h * (2.0 * h2 - h1) / (6.0 * h2)
        i += 2
    if i == n - 2:  # one interval left
        h = x[-1] - x[-2]
        w[-2] += 0.5 * h
        w[-1] += 0.5 * h
    return w


def build_volume_grid(pair: PrimaryPair, medium: Medium,
                      settings: SolverSettings | None = None) -> VolumeGrid:
    """Quadrature grid sized from the primary-field geometry.

    Axially: steps of lambda_u/ppw_axial through the collimated zone
    (the primary interference structure must be resolved), geometric
    stretching beyond, capped at lambda_a/audio_ppw; the domain ends
    where the estimated primary product drops ``truncation_db`` below
    its maximum.  Radially: lambda_u/ppw_radial out to
    ``radial_factor`` aperture radii, then stretched to cover the
    diffraction-spread beam at the domain end.
    """
    st = settings or SolverSettings()
    a = pair.radius_a
    c0 = medium.sound_speed
    lam_u = c0 / pair.f_u2
    lam_a = c0 / pair.f_a
    k_u = 2.0 * np.pi / lam_u
    k_a = 2.0 * np.pi / lam_a

    z1 = a * a / lam_u - lam_u / 4.0 if a > lam_u / 2.0 else 0.0
    z_near = max(z1, 2.0 * a, 4.0 * lam_u)
    dz_near = lam_u / st.ppw_axial
    # piston pairs: the product's interference beat slows as (a/z)^2, so
    # the step can grow once past the aperture scale; structured profiles
    # (plate modes) radiate conical components whose beat persists, so
    # they keep the conservative uniform near-zone step
    compact = (pair.profile_1.kind is SourceKind.PISTON
               and pair.profile_2.kind is SourceKind.PISTON)

    # axial extent from the closed-form on-axis product envelope
    def mean_abs_velocity(profile):
        r, v = profile.radii, np.abs(profile.velocity)
        return max(np.trapezoid(v * r, r) * 2.0 / a ** 2, 1e-30)

    zp = np.geomspace(max(dz_near, 1e-4), st.z_max_cap, 1200)
    env = np.ones_like(zp)
    for f_i, prof in ((pair.f_u1, pair.profile_1), (pair.f_u2, pair.profile_2)):
        spec = PistonSpec(a, mean_abs_velocity(prof))
        # envelope of |p|: clip the oscillating sine factor to 1
        lam_i = c0 / f_i
        k_i = 2 * np.pi / lam_i
        amp = np.minimum(1.0, k_i / 2.0 * (np.sqrt(zp ** 2 + a ** 2) - zp))
        rho_c = medium.density * c0
        env = env * (2 * rho_c * np.abs(spec.normal_velocity) * amp
                     * np.exp(-absorption_coeff(medium, f_i) * zp))
    rel_db = 20.0 * np.log10(env / np.max(env))
    above = np.flatnonzero(rel_db >= -st.truncation_db)
    z_max = min(float(zp[above[-1]]) if above.size else z_near * 4.0, st.z_max_cap)
    z_max = max(z_max, z_near * 1.5)

    # march the axial nodes
    dz_cap = lam_a / st.audio_ppw
    z_list = [dz_near / 2.0]
    dz = dz_near
    while z_list[-1] < z_max:
        z = z_list[-1]
        if compact:
            rate = k_a + st.beat_safety * k_u * min(1.0, (a / z) ** 2)
            dz = min(2.0 * np.pi / rate / st.ppw_axial, dz_cap)
        elif z < z_near:
            dz = dz_near
        else:
            dz = min(dz * st.stretch, dz_cap)
        z_list.append(z + dz)
    z_nodes = np.asarray(z_list)

    # radial nodes: uniform core + stretched outer zone
    dr = lam_u / st.ppw_radial
    r_core = st.radial_factor * a
    r_nodes = list(np.arange(dr / 2.0, r_core, dr))
    sin_bw = min(0.61 * lam_u / a, 0.5)
    r_max = st.radial_factor * (a + z_max * sin_bw) / 2.0
    r_max = max(r_max, r_core)
    r = r_nodes[-1]
    drr = dr
    while r < r_max:
        drr *= 1.05
        r += drr
        r_nodes.append(r)
    r_nodes = np.asarray(r_nodes)

    wz = _quad_weights(z_nodes)
    wz[0] += z_nodes[0]  # strip between the source plane and the first node
    wr = _quad_weights(r_nodes)
    wr[0] += r_nodes[0]
    wr[-1] += drr / 2.0

    return VolumeGrid(
        z_nodes=z_nodes, r_nodes=r_nodes, wz=wz, wr=wr,
        truncation_db=st.truncation_db,
        meta={"z1": z1, "z_max": z_max, "lam_u": lam_u, "lam_a": lam_a},
    )


class QuasilinearSolver:
    """Caches the primary product on a volume grid and evaluates audio points.

    The costly part (primary fields on the quadrature grid) happens once
    per pair; observation points are then independent sums, evaluated in
    a fixed order so results do not depend on request batching.
    """

    def __init__(self, pair: PrimaryPair, medium: Medium,
                 settings: SolverSettings | None = None,
                 grid: VolumeGrid | None = None,
                 primary_carrier: np.ndarray | None = None):
        self.pair = pair
        self.medium = medium
        self.settings = settings or SolverSettings()
        self.grid = grid if grid is not None else build_volume_grid(pair, medium, self.settings)

        g = self.grid
        skirt = self.settings.truncation_db / 2.0 + 10.0
        p1 = pressure_grid(pair.profile_1, medium, pair.f_u1, g.r_nodes, g.z_nodes,
                           include_evanescent=self.settings.include_evanescent,
                           skirt_cut_db=skirt)
        if primary_carrier is not None:
            p2 = primary_carrier
        else:
            p2 = pressure_grid(pair.profile_2, medium, pair.f_u2, g.r_nodes, g.z_nodes,
                               include_evanescent=self.settings.include_evanescent,
                               skirt_cut_db=skirt)
        self.primary_carrier = p2

        omega_a = 2.0 * np.pi * pair.f_a
        coef = medium.beta * omega_a ** 2 / (medium.density * medium.sound_speed ** 4)
        # phase-matched virtual source: carrier times conjugated sideband
        self._source = coef * np.conj(p1) * p2
        self._sw = self._source * (g.wz[:, None] * (g.wr * g.r_nodes)[None, :])
        self._k_audio = medium.complex_wavenumber(pair.f_a)
        self._tail_scale = self._estimate_tail()

        # flattened cell arrays with negligible cells dropped: the bound on
        # the discarded total is n_cells * 1e-9 of the peak weighted cell
        sw_flat = self._sw.ravel()
        keep = np.abs(sw_flat) > 1e-9 * np.max(np.abs(sw_flat))
        zz, rr = np.meshgrid(g.z_nodes, g.r_nodes, indexing="ij")
        self._cell_z = zz.ravel()[keep]
        self._cell_r = rr.ravel()[keep]
        self._cell_r2 = self._cell_r ** 2
        self._cell_sw = sw_flat[keep]

    def _estimate_tail(self) -> float:
        """Crude upper estimate of the source strength beyond the domain."""
        g = self.grid
        alpha_sum = (absorption_coeff(self.medium, self.pair.f_u1)
                     + absorption_coeff(self.medium, self.pair.f_u2))
        decay_len = 1.0 / (alpha_sum + 2.0 / g.z_nodes[-1])
        last = np.abs(self._source[-1, :]) @ (g.wr * g.r_nodes)
        return float(last * 2.0 * np.pi * decay_len)

    def _check_tail(self, p_ref: float, z_obs: float):
        g = self.grid
        dist = max(abs(g.z_nodes[-1] - z_obs), g.meta.get("lam_a", 0.1))
        tail = self._tail_scale / (4.0 * np.pi * dist)
        if p_ref > 0 and tail / p_ref > self.settings.tail_warn_fraction:
            warnings.warn(
                f"volume truncation tail estimated at {tail / p_ref:.1%} of the "
                f"audio pressure (budget {self.settings.tail_warn_fraction:.0%}); "
                "increase truncation_db",
                TruncationTailWarning,
                stacklevel=3,
            )

    def pressures(self, rho, z) -> np.ndarray:
        """Audio pressure at (rho, z) observation arrays."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if np.any(z < 0):
            raise ParameterDomainError("observation points need z >= 0")
        out = np.empty(rho.shape, dtype=complex)
        on = rho == 0.0
        if np.any(on):
            out[on] = self._on_axis_many(z[on])
        for i in np.flatnonzero(~on):
            out[i] = self._off_axis(rho[i], z[i])
        if out.size:
            self._check_tail(float(np.max(np.abs(out))), float(z[np.argmax(np.abs(out))]))
        return out

    def pressure(self, pt: FieldPoint) -> complex:
        return complex(self.pressures(pt.rho, pt.z)[0])

    def _on_axis_many(self, z_obs: np.ndarray) -> np.ndarray:
        out = np.empty(z_obs.size, dtype=complex)
        chunk = max(1, int(8e6 / max(self._cell_sw.size, 1)))
        for s in range(0, z_obs.size, chunk):
            zz = z_obs[s:s + chunk, None]
            bigr = np.sqrt((zz - self._cell_z[None, :]) ** 2 + self._cell_r2[None, :])
            kern = np.exp(-1j * self._k_audio * bigr) / (4.0 * np.pi * bigr)
            kern *= self._cell_sw[None, :]
            # row-wise pairwise summation: identical results regardless of
            # how observation points are batched
            out[s:s + chunk] = 2.0 * np.pi * kern.sum(axis=1)
        return out

    def _off_axis(self, rho_obs: float, z_obs: float) -> complex:
        dz2 = (z_obs - self._cell_z) ** 2
        base = dz2 + rho_obs ** 2 + self._cell_r2
        cross = 2.0 * rho_obs * self._cell_r
        prev = None
        order = 16
        while order <= _MAX_GREEN_ORDER:
            x, wgl = _gauss_legendre(order)
            cosphi = np.cos(0.5 * np.pi * (x + 1.0))
            wphi = wgl * (np.pi / 2.0)
            acc = 0.0 + 0.0j
            for cp, wp in zip(cosphi, wphi):
                bigr = np.sqrt(base - cross * cp)
                acc += wp * np.sum(self._cell_sw * np.exp(-1j * self._k_audio * bigr)
                                   / (4.0 * np.pi * bigr))
            cur = 2.0 * acc  # symmetry about phi = pi
            if prev is not None:
                tol = (10.0 ** (self.settings.refine_db / 20.0) - 1.0)
                if abs(cur - prev) <= tol * abs(cur) + 1e-30:
                    return complex(cur)
            prev = cur
            order *= 2
        raise NumericalFailureError(
            f"azimuthal Green quadrature failed to converge at order "
            f"{_MAX_GREEN_ORDER} (rho={rho_obs:.4g}, z={z_obs:.4g})"
        )

    def propagation_curve(self, z_grid) -> FieldCurve:
        z = np.asarray(z_grid, dtype=float)
        if z.size == 0:
            raise ParameterDomainError("z grid must be non-empty")
        if np.any(z <= 0) or (z.size > 1 and np.any(np.diff(z) <= 0)):
            raise ParameterDomainError("z grid must be positive and strictly increasing")
        p = self.pressures(np.zeros_like(z), z)
        return FieldCurve(z, p, self.pair.f_a, kind="audio_propagation",
                          meta={"f_u1": self.pair.f_u1, "f_u2": self.pair.f_u2})

    def beam_pattern(self, r: float, theta_grid) -> FieldCurve:
        if r <= 0:
            raise ParameterDomainError("range r must be positive")
        theta = np.asarray(theta_grid, dtype=float)
        if theta.size == 0 or np.any(np.abs(theta) > 90.0):
            raise ParameterDomainError("theta grid must be within [-90, 90] deg")
        th = np.deg2rad(theta)
        p = self.pressures(r * np.abs(np.sin(th)), r * np.cos(th))
        return FieldCurve(theta, p, self.pair.f_a, kind="audio_beam",
                          meta={"range_m": r, "f_u1": self.pair.f_u1,
                                "f_u2": self.pair.f_u2})


def quasilinear_pressure(pair: PrimaryPair, medium: Medium, pt: FieldPoint,
                         grid: VolumeGrid | None = None,
                         settings: SolverSettings | None = None) -> complex:
    """Difference-frequency pressure at one observation point."""
    return QuasilinearSolver(pair, medium, settings, grid).pressure(pt)


def audio_propagation_curve(pair: PrimaryPair, medium: Medium, z_grid,
                            settings: SolverSettings | None = None) -> FieldCurve:
    """On-axis audio pressure over an axial grid."""
    return QuasilinearSolver(pair, medium, settings).propagation_curve(z_grid)


def audio_beam_pattern(pair: PrimaryPair, medium: Medium, r: float, theta_grid,
                       settings: SolverSettings | None = None) -> FieldCurve:
    """Off-axis audio pressure at fixed range over polar angles."""
    return QuasilinearSolver(pair, medium, settings).beam_pattern(r, theta_grid)


def find_audio_cd(curve: FieldCurve) -> AudioCd:
    """Location and SPL of the curve maximum, with parabolic refinement.

    Ties break toward smaller z; a maximum on the grid boundary raises a
    :class:`BoundaryPeakWarning` (the grid was too short) and returns
    the boundary sample.
    """
    from .transducer import _parabolic_peak

    spl = curve.spl
    i = int(np.argmax(spl))
    z = curve.abscissa
    if i == 0 or i == spl.size - 1:
        warnings.warn(
            "curve maximum lies on the grid boundary; extend the z grid",
            BoundaryPeakWarning,
            stacklevel=2,
        )
        return AudioCd(distance=float(z[i]), spl=float(spl[i]))
    z_pk, s_pk = _parabolic_peak(z, spl, i)
    return AudioCd(distance=z_pk, spl=s_pk)


def berktay_farfield(pair: PrimaryPair, medium: Medium, z: float) -> float:
    """Far-field audio amplitude of a collimated two-tone beam.

    Standard envelope-demodulation result for a piston-like source:
    |p_a| = beta * w_a^2 * a^2 * P1 * P2 / (4 rho0 c0^4 z alpha_T) with
    alpha_T the summed primary attenuation; audio absorption over the
    path is applied on top.  Scales with f_a^2 and with the product of
    the primary amplitudes; used as an independent slope and scale
    cross-check of the volume solver.
    """
    a = pair.radius_a
    c0 = medium.sound_speed
    lam2 = c0 / pair.f_u2
    z1 = a * a / lam2 - lam2 / 4.0 if a > lam2 / 2.0 else 0.0
    if z <= 5.0 * z1:
        raise ParameterDomainError(
            f"Berktay far-field form needs z well beyond the collimation "
            f"zone (z > {5.0 * z1:.3g} m)"
        )
    rho_c = medium.density * c0
    p1 = rho_c * abs(pair.profile_1.center_velocity)
    p2 = rho_c * abs(pair.profile_2.center_velocity)
    alpha_t = (absorption_coeff(medium, pair.f_u1)
               + absorption_coeff(medium, pair.f_u2))
    alpha_t = max(alpha_t, 1e-12)
    omega_a = 2.0 * np.pi * pair.f_a
    mag = (medium.beta * omega_a ** 2 * a ** 2 * p1 * p2
           / (4.0 * medium.density * c0 ** 4 * z * alpha_t))
    return float(mag * np.exp(-absorption_coeff(medium, pair.f_a) * z))
