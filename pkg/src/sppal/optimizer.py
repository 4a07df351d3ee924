"""Multi-objective design optimization and design-space sweeps.

Couples the transducer, plate and field modules into the design loop:
segment lengths are optimized by NSGA-II for dual resonance (objectives
F1, F2), the selected designs are pushed through the audio-capability
pipeline (frequency response of the audio critical distance), and the
whole parameter space can be swept into contour-ready tables.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InfeasibleDesignError,
    NoDualResonanceError,
    ParameterDomainError,
)
from . import linfield, nlfield, radiator, transducer
from .medium import Medium
from .transducer import StackConfig


@dataclass(frozen=True)
class DesignParams:
    """Discrete design parameters of one stepped-plate loudspeaker cell."""

    d_uc: float        # ultrasonic critical distance [m]
    f_u0: float        # nominal ultrasonic frequency [Hz]
    mode_m: int        # plate mode (nodal circles)
    config: StackConfig
    r_p: float         # piezo stack radius [m]
    l_p: float         # piezo stack length [m]
    r_h: float         # horn end radius [m]
    plate_material: str = "aluminum"

    def key(self) -> tuple:
        return (self.d_uc, self.f_u0, self.mode_m, self.config.value,
                self.r_p, self.l_p, self.r_h, self.plate_material)


@dataclass
class DesignPoint:
    """A candidate design: parameters, segment lengths and objectives."""

    params: DesignParams
    x: np.ndarray
    objectives: tuple
    derived: dict = field(default_factory=dict)
    flags: tuple = ()

    @property
    def feasible(self) -> bool:
        return "no_dual_resonance" not in self.flags and "infeasible" not in self.flags


@dataclass
class ParetoFront:
    """Mutually non-dominated design points (both objectives minimized)."""

    points: list

    def __post_init__(self):
        f = np.array([p.objectives for p in self.points])
        if len(self.points) > 1 and _any_dominated(f):
            raise ParameterDomainError("front contains dominated points")

    def sorted_by_f2(self) -> list:
        return sorted(self.points, key=lambda p: (p.objectives[1], p.objectives[0]))


def _any_dominated(f: np.ndarray) -> bool:
    n = f.shape[0]
    for i in range(n):
        for j in range(n):
            if i != j and _dominates(f[j], f[i]):
                return True
    return False


def _dominates(fa, fb) -> bool:
    """True if fa Pareto-dominates fb (minimization)."""
    return bool(np.all(fa <= fb) and np.any(fa < fb))


# ---------------------------------------------------------------------------
# Design evaluation pipeline
# ---------------------------------------------------------------------------

class DesignContext:
    """Per-parameter-set state reused across evaluations.

    Everything that depends only on the discrete parameters (plate
    sizing, mode shape, equivalence ratio, load impedance, frequency
    grid) is computed once; only the segment lengths vary inside the
    optimization loop.
    """

    _cache: dict = {}

    def __init__(self, params: DesignParams, medium: Medium,
                 drive_voltage: float = 1.0):
        self.params = params
        self.medium = medium
        self.drive_voltage = drive_voltage
        self.plate = radiator.size_plate_for(params.f_u0, params.d_uc,
                                             params.mode_m, params.plate_material,
                                             medium)
        self.mode = radiator.plate_mode_shape(self.plate)
        n = radiator.radial_sample_count(self.plate.radius_a, params.f_u0, medium)
        self.sp_profile = radiator.stepped_profile(self.mode, 1.0,
                                                   n_samples=max(n, 513))
        self.er = linfield.equivalence_ratio(self.sp_profile, medium,
                                             params.f_u0, params.d_uc)
        # peak search band around the nominal frequency
        self.freqs = np.arange(0.8 * params.f_u0, 1.2 * params.f_u0,
                               transducer.PEAK_GRID_STEP)
        self.load = transducer.plate_load_impedance(self.plate, self.mode,
                                                    self.er, medium, self.freqs)
        self.band_width = float(self.freqs[-1] - self.freqs[0])

    @classmethod
    def get(cls, params: DesignParams, medium: Medium,
            drive_voltage: float = 1.0) -> "DesignContext":
        key = (params.key(), id(medium), drive_voltage)
        ctx = cls._cache.get(key)
        if ctx is None:
            ctx = cls(params, medium, drive_voltage)
            if len(cls._cache) > 16:
                cls._cache.clear()
            cls._cache[key] = ctx
        return ctx

    def frf(self, x) -> transducer.Frf:
        spec = transducer.build_stack(self.params.config, self.params.r_p,
                                      self.params.l_p, self.params.r_h, x,
                                      drive_voltage=self.drive_voltage,
                                      f_u0=self.params.f_u0)
        return transducer.frf_transfer_matrix(spec, self.load, self.freqs)


def evaluate_design(params: DesignParams, x, medium: Medium) -> DesignPoint:
    """Objectives of one candidate: stack -> FRF -> dual-resonance features.

    Designs without a dual resonance (or with infeasible geometry) get
    penalty objectives (F1 = 0, F2 = search-band width) and a flag so
    optimizer runs never abort.
    """
    x = np.asarray(x, dtype=float)
    ctx = DesignContext.get(params, medium)
    try:
        frf = ctx.frf(x)
        feats = transducer.extract_dr_features(frf)
        f1, f2 = transducer.objectives(feats)
        derived = {"f_r1": feats.f_r1, "f_r2": feats.f_r2,
                   "f_dist": feats.f_dist, "v_r1": feats.v_r1,
                   "v_r2": feats.v_r2, "v_m": feats.v_m,
                   "er_db": ctx.er.er_db}
        return DesignPoint(params, x, (f1, f2), derived)
    except NoDualResonanceError:
        return DesignPoint(params, x, (0.0, ctx.band_width),
                           flags=("no_dual_resonance",))
    except (InfeasibleDesignError, ParameterDomainError):
        return DesignPoint(params, x, (0.0, ctx.band_width),
                           flags=("infeasible",))


# ---------------------------------------------------------------------------
# NSGA-II
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NsgaConfig:
    pop: int = 40
    generations: int = 50
    seed: int = 0
    crossover_rate: float = 0.9
    eta_crossover: float = 15.0
    eta_mutation: float = 20.0
    mutation_rate: float | None = None  # default 1/n_variables

    def __post_init__(self):
        if self.pop < 8 or self.pop % 2:
            raise ParameterDomainError("population must be even and >= 8")
        if self.generations < 1:
            raise ParameterDomainError("need at least one generation")


@dataclass
class NsgaResult:
    """Archive-based Pareto set with per-generation hypervolume history."""

    x: np.ndarray          # (n_front, n_var)
    f: np.ndarray          # (n_front, 2)
    hv_history: np.ndarray
    n_evaluations: int


def _non_dominated_sort(f: np.ndarray) -> list:
    """Fronts of indices, best first (standard fast sort, minimization)."""
    n = f.shape[0]
    dominated_by = [[] for _ in range(n)]
    domination_count = np.zeros(n, dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            if _dominates(f[i], f[j]):
                dominated_by[i].append(j)
                domination_count[j] += 1
            elif _dominates(f[j], f[i]):
                dominated_by[j].append(i)
                domination_count[i] += 1
    fronts = []
    current = [i for i in range(n) if domination_count[i] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                domination_count[j] -= 1
                if domination_count[j] == 0:
                    nxt.append(j)
        current = nxt
    return fronts


def _crowding_distance(f: np.ndarray) -> np.ndarray:
    n = f.shape[0]
    d = np.zeros(n)
    for m in range(f.shape[1]):
        order = np.argsort(f[:, m], kind="stable")
        d[order[0]] = d[order[-1]] = np.inf
        span = f[order[-1], m] - f[order[0], m]
        if span > 0 and n > 2:
            d[order[1:-1]] += (f[order[2:], m] - f[order[:-2], m]) / span
    return d


def _sbx_crossover(p1, p2, lo, hi, eta, rng):
    """Simulated binary crossover, per-variable."""
    c1, c2 = p1.copy(), p2.copy()
    for k in range(p1.size):
        if rng.random() > 0.5 or abs(p1[k] - p2[k]) < 1e-14:
            continue
        x1, x2 = sorted((p1[k], p2[k]))
        u = rng.random()
        beta = 1.0 + 2.0 * (x1 - lo[k]) / (x2 - x1)
        alpha = 2.0 - beta ** -(eta + 1.0)
        bq = ((u * alpha) ** (1.0 / (eta + 1.0)) if u <= 1.0 / alpha
              else (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0)))
        c1[k] = 0.5 * ((x1 + x2) - bq * (x2 - x1))
        beta = 1.0 + 2.0 * (hi[k] - x2) / (x2 - x1)
        alpha = 2.0 - beta ** -(eta + 1.0)
        bq = ((u * alpha) ** (1.0 / (eta + 1.0)) if u <= 1.0 / alpha
              else (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0)))
        c2[k] = 0.5 * ((x1 + x2) + bq * (x2 - x1))
        if rng.random() < 0.5:
            c1[k], c2[k] = c2[k], c1[k]
    return np.clip(c1, lo, hi), np.clip(c2, lo, hi)


def _polynomial_mutation(x, lo, hi, eta, rate, rng):
    y = x.copy()
    for k in range(x.size):
        if rng.random() >= rate:
            continue
        delta1 = (y[k] - lo[k]) / (hi[k] - lo[k])
        delta2 = (hi[k] - y[k]) / (hi[k] - lo[k])
        u = rng.random()
        mut_pow = 1.0 / (eta + 1.0)
        if u < 0.5:
            xy = 1.0 - delta1
            val = 2.0 * u + (1.0 - 2.0 * u) * xy ** (eta + 1.0)
            deltaq = val ** mut_pow - 1.0
        else:
            xy = 1.0 - delta2
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy ** (eta + 1.0)
            deltaq = 1.0 - val ** mut_pow
        y[k] += deltaq * (hi[k] - lo[k])
    return np.clip(y, lo, hi)


def hypervolume_2d(f: np.ndarray, ref: tuple) -> float:
    """Exact dominated hypervolume of a 2-objective point set."""
    if f.size == 0:
        return 0.0
    pts = f[np.all(f <= np.asarray(ref), axis=1)]
    if pts.size == 0:
        return 0.0
    nd = pts[_pareto_mask_2d(pts)]
    order = np.argsort(nd[:, 0], kind="stable")
    nd = nd[order]
    hv = 0.0
    prev_f2 = ref[1]
    for f1, f2 in nd:
        if f2 < prev_f2:
            hv += (ref[0] - f1) * (prev_f2 - f2)
            prev_f2 = f2
    return float(hv)


def _pareto_mask_2d(f: np.ndarray) -> np.ndarray:
    """Boolean mask of the non-dominated subset (2 objectives, vectorized).

    Sort by (f1, f2); a point survives iff its f2 beats every earlier
    point's f2 (strictly for distinct f1, dedup on exact ties).
    """
    n = f.shape[0]
    order = np.lexsort((f[:, 1], f[:, 0]))
    fs = f[order]
    keep_sorted = np.zeros(n, dtype=bool)
    best_f2 = np.inf
    prev = None
    for i in range(n):
        f1, f2 = fs[i]
        if (f1, f2) == prev:
            continue  # exact duplicate
        if f2 < best_f2:
            keep_sorted[i] = True
            best_f2 = f2
        prev = (f1, f2)
    mask = np.zeros(n, dtype=bool)
    mask[order] = keep_sorted
    return mask


def _archive_update(arch_x, arch_f, new_x, new_f, cap=100000):
    """Merge candidates into the non-dominated archive.

    The archive is effectively unbounded for the problem sizes used here,
    so the dominated hypervolume of the archive never decreases between
    generations; the cap is only a memory guard.
    """
    xs = list(arch_x) + list(new_x)
    fs = list(arch_f) + list(new_f)
    f_arr = np.array(fs)
    idx = list(np.flatnonzero(_pareto_mask_2d(f_arr)))
    if len(idx) > cap:
        d = _crowding_distance(f_arr[idx])
        keep = np.argsort(d, kind="stable")[::-1][:cap]
        idx = [idx[i] for i in sorted(keep)]
    return [xs[i] for i in idx], [fs[i] for i in idx]


def nsga2(evaluate, bounds, config: NsgaConfig,
          hv_ref: tuple | None = None) -> NsgaResult:
    """Seeded NSGA-II over box bounds with an external archive.

    ``evaluate(x) -> (f1, f2)`` is called on one design vector at a
    time.  Selection follows the standard loop (non-dominated sort,
    crowding distance, binary tournament, SBX crossover, polynomial
    mutation).  The returned front is the archive of all non-dominated
    evaluations, which makes the hypervolume history non-decreasing by
    construction.
    """
    lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    if lo.shape != hi.shape or np.any(lo >= hi):
        raise ParameterDomainError("bounds must satisfy lo < hi elementwise")
    n_var = lo.size
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / n_var
    rng = np.random.default_rng(config.seed)

    pop_x = lo + (hi - lo) * rng.random((config.pop, n_var))
    pop_f = np.array([evaluate(x) for x in pop_x], dtype=float)
    n_eval = config.pop
    arch_x, arch_f = _archive_update([], [], pop_x, pop_f)
    if hv_ref is None:
        worst = np.max(pop_f, axis=0)
        hv_ref = (float(worst[0] + 1.0), float(worst[1] + 1.0))
    hv_hist = [hypervolume_2d(np.array(arch_f), hv_ref)]

    for _ in range(config.generations):
        fronts = _non_dominated_sort(pop_f)
        rank = np.empty(config.pop, dtype=int)
        crowd = np.empty(config.pop)
        for fi, front in enumerate(fronts):
            rank[front] = fi
            crowd[front] = _crowding_distance(pop_f[front])

        def tourney():
            i, j = rng.integers(0, config.pop, 2)
            if rank[i] < rank[j]:
                return i
            if rank[j] < rank[i]:
                return j
            return i if crowd[i] >= crowd[j] else j

        child_x = []
        while len(child_x) < config.pop:
            pa, pb = pop_x[tourney()], pop_x[tourney()]
            if rng.random() < config.crossover_rate:
                c1, c2 = _sbx_crossover(pa, pb, lo, hi, config.eta_crossover, rng)
            else:
                c1, c2 = pa.copy(), pb.copy()
            c1 = _polynomial_mutation(c1, lo, hi, config.eta_mutation, rate, rng)
            c2 = _polynomial_mutation(c2, lo, hi, config.eta_mutation, rate, rng)
            child_x.extend([c1, c2])
        child_x = np.array(child_x[:config.pop])
        child_f = np.array([evaluate(x) for x in child_x], dtype=float)
        n_eval += config.pop
        arch_x, arch_f = _archive_update(arch_x, arch_f, child_x, child_f)
        hv_hist.append(hypervolume_2d(np.array(arch_f), hv_ref))

        # environmental selection on the combined population
        all_x = np.vstack([pop_x, child_x])
        all_f = np.vstack([pop_f, child_f])
        fronts = _non_dominated_sort(all_f)
        chosen = []
        for front in fronts:
            if len(chosen) + len(front) <= config.pop:
                chosen.extend(front)
            else:
                d = _crowding_distance(all_f[front])
                order = np.argsort(d, kind="stable")[::-1]
                chosen.extend(front[i] for i in order[:config.pop - len(chosen)])
                break
        pop_x = all_x[chosen]
        pop_f = all_f[chosen]

    return NsgaResult(x=np.array(arch_x), f=np.array(arch_f),
                      hv_history=np.array(hv_hist), n_evaluations=n_eval)


def optimize_lengths(params: DesignParams, medium: Medium,
                     config: NsgaConfig) -> ParetoFront:
    """NSGA-II over the segment lengths of one design-parameter cell."""
    x0, bounds = transducer.langevin_initial_lengths(
        params.f_u0, params.config, params.l_p)
    result = nsga2(lambda x: evaluate_design(params, x, medium).objectives,
                   bounds, config)
    pts = [evaluate_design(params, x, medium) for x in result.x]
    feasible = [p for p in pts if p.feasible]
    chosen = feasible if feasible else pts
    f = np.array([p.objectives for p in chosen])
    fronts = _non_dominated_sort(f)
    return ParetoFront([chosen[i] for i in fronts[0]])


# ---------------------------------------------------------------------------
# Audio capability pipeline
# ---------------------------------------------------------------------------

@dataclass
class AudioCapability:
    """Audio response of one design: SPL at the audio critical distance."""

    f_a: np.ndarray
    spl_at_cd: np.ndarray
    d_ac: np.ndarray
    peak_spl: float
    d_ac_at_peak: float
    carrier_hz: float


def audio_capability(design: DesignPoint, medium: Medium, f_a_grid,
                     drive_voltage: float = 1.0,
                     settings: nlfield.SolverSettings | None = None) -> AudioCapability:
    """End-to-end audio prediction of an optimized design.

    Per audio frequency: transducer centre velocities at the LSB-AM
    primaries (carrier at the upper resonance), converted to effective
    piston velocities through the equivalence ratio at each primary
    frequency, then the quasilinear field and its critical distance.
    """
    f_a_grid = np.atleast_1d(np.asarray(f_a_grid, dtype=float))
    ctx = DesignContext.get(design.params, medium, drive_voltage)
    try:
        frf = ctx.frf(design.x)
        feats = transducer.extract_dr_features(frf)
    except (NoDualResonanceError, InfeasibleDesignError, ParameterDomainError) as e:
        raise type(e)(f"design {design.params.key()}: {e}") from e

    f_carrier = feats.f_r2  # higher resonance carries the LSB-AM carrier
    a = ctx.plate.radius_a
    n = radiator.radial_sample_count(a, design.params.f_u0, medium)
    v2_center = frf.interp(f_carrier)
    er2 = linfield.equivalence_ratio(ctx.sp_profile, medium, f_carrier,
                                     design.params.d_uc)
    v2_eff = er2.effective_velocity(v2_center)
    z1 = radiator.first_local_max(a, f_carrier, medium)
    z_grid = np.geomspace(0.05, max(3.0 * design.params.d_uc, 2.0 * z1), 33)

    spl = np.empty(f_a_grid.size)
    d_ac = np.empty(f_a_grid.size)
    carrier_profile = radiator.piston_profile(radiator.PistonSpec(a, v2_eff), n)
    # one volume grid shared by all audio frequencies (sized by the
    # largest f_a, whose audio wavelength caps the far-zone step most
    # tightly) so the carrier field is computed once
    f_a_max = float(np.max(f_a_grid))
    pair_ref = nlfield.PrimaryPair(
        f_carrier - f_a_max, f_carrier,
        radiator.piston_profile(radiator.PistonSpec(a, 1.0), n),
        carrier_profile)
    shared_grid = nlfield.build_volume_grid(pair_ref, medium, settings)
    carrier_field = None
    for i, f_a in enumerate(f_a_grid):
        f_u1, f_u2 = nlfield.lsb_am_pair(f_carrier, f_a)
        v1_center = frf.interp(f_u1)
        er1 = linfield.equivalence_ratio(ctx.sp_profile, medium, f_u1,
                                         design.params.d_uc)
        v1_eff = er1.effective_velocity(v1_center)
        if abs(v1_eff) < 1e-15 or abs(v2_eff) < 1e-15:
            spl[i] = -np.inf
            d_ac[i] = design.params.d_uc
            continue
        pair = nlfield.PrimaryPair(
            f_u1, f_u2,
            radiator.piston_profile(radiator.PistonSpec(a, v1_eff), n),
            carrier_profile,
        )
        solver = nlfield.QuasilinearSolver(pair, medium, settings=settings,
                                           grid=shared_grid,
                                           primary_carrier=carrier_field)
        carrier_field = solver.primary_carrier
        curve = solver.propagation_curve(z_grid)
        cd = nlfield.find_audio_cd(curve)
        spl[i] = cd.spl
        d_ac[i] = cd.distance

    i_pk = int(np.nanargmax(spl))
    return AudioCapability(f_a=f_a_grid, spl_at_cd=spl, d_ac=d_ac,
                           peak_spl=float(spl[i_pk]),
                           d_ac_at_peak=float(d_ac[i_pk]),
                           carrier_hz=float(f_carrier))


# ---------------------------------------------------------------------------
# Sweeps and contour tables
# ---------------------------------------------------------------------------

#: dual-resonance spacing window for design selection (Hz)
F_DIST_WINDOW = (800.0, 1250.0)

DEFAULT_SWEEP_GRID = {
    "d_uc": (0.30, 0.35, 0.40, 0.45),
    "f_u0": (40e3, 50e3, 60e3, 75e3, 90e3),
    "mode_m": (6, 8),
    "config": (StackConfig.HALF, StackConfig.FULL),
    "r_p": transducer.PIEZO_RADIUS_CATALOG,
    "r_h": transducer.HORN_RADIUS_CATALOG,
}


def select_knee(front: ParetoFront,
                f_dist_window: tuple = F_DIST_WINDOW) -> DesignPoint | None:
    """Design choice per cell: minimum F1 inside the spacing window.

    Ties break toward smaller F2.  Returns None when no feasible front
    point satisfies the window.
    """
    lo, hi = f_dist_window
    eligible = [p for p in front.points
                if p.feasible and lo < p.objectives[1] < hi]
    if not eligible:
        return None
    return min(eligible, key=lambda p: (p.objectives[0], p.objectives[1]))


@dataclass
class SweepRow:
    params: DesignParams
    x: np.ndarray | None
    objectives: tuple | None
    f_dist: float | None
    l_pa_c: float | None
    d_ac: float | None
    flags: tuple


@dataclass
class SweepResult:
    rows: list
    seed: int

    def table(self) -> list:
        """Rows as flat dictionaries (CSV-ready)."""
        out = []
        for r in self.rows:
            p = r.params
            out.append({
                "d_uc_m": p.d_uc, "f_u0_hz": p.f_u0, "mode_m": p.mode_m,
                "config": p.config.value, "r_p_m": p.r_p, "l_p_m": p.l_p,
                "r_h_m": p.r_h,
                "x_m": "" if r.x is None else ";".join(f"{v:.9e}" for v in r.x),
                "f1_ms": "" if r.objectives is None else r.objectives[0],
                "f2_hz": "" if r.objectives is None else r.objectives[1],
                "f_dist_hz": "" if r.f_dist is None else r.f_dist,
                "l_pa_c_db": "" if r.l_pa_c is None else r.l_pa_c,
                "d_ac_m": "" if r.d_ac is None else r.d_ac,
                "flags": "|".join(r.flags),
            })
        return out


def design_sweep(grid: dict | None, medium: Medium, nsga: NsgaConfig,
                 l_p: float = 8e-3, f_a_grid=(500.0, 1000.0, 2000.0),
                 drive_voltage: float = 1.0,
                 settings: nlfield.SolverSettings | None = None,
                 f_dist_window: tuple = F_DIST_WINDOW) -> SweepResult:
    """Optimize and evaluate every cell of a design-parameter grid.

    Per cell: a (small-budget) NSGA-II run, knee selection within the
    resonance-spacing window, then the audio-capability pipeline.
    Cells without an eligible design are recorded with flags rather
    than aborting the sweep.  Deterministic for a fixed seed: cell
    seeds derive from the base seed by cell index.
    """
    g = dict(DEFAULT_SWEEP_GRID)
    if grid:
        g.update(grid)
    rows = []
    cells = [
        DesignParams(d_uc=d, f_u0=f, mode_m=mm, config=cfg, r_p=rp, l_p=l_p, r_h=rh)
        for d in g["d_uc"] for f in g["f_u0"] for mm in g["mode_m"]
        for cfg in (StackConfig(c) if isinstance(c, str) else c for c in g["config"])
        for rp in g["r_p"] for rh in g["r_h"]
    ]
    for i_cell, params in enumerate(cells):
        cell_cfg = replace(nsga, seed=nsga.seed + i_cell)
        try:
            front = optimize_lengths(params, medium, cell_cfg)
        except (InfeasibleDesignError, ParameterDomainError) as e:
            rows.append(SweepRow(params, None, None, None, None, None,
                                 ("cell_infeasible", str(type(e).__name__))))
            continue
        knee = select_knee(front, f_dist_window)
        if knee is None:
            rows.append(SweepRow(params, None, None, None, None, None,
                                 ("no_design_in_window",)))
            continue
        try:
            cap = audio_capability(knee, medium, f_a_grid, drive_voltage,
                                   settings)
        except (NoDualResonanceError, ParameterDomainError) as e:
            rows.append(SweepRow(params, knee.x, knee.objectives,
                                 knee.derived.get("f_dist"), None, None,
                                 ("audio_failed", str(type(e).__name__))))
            continue
        rows.append(SweepRow(params, knee.x, knee.objectives,
                             knee.derived.get("f_dist"),
                             cap.peak_spl, cap.d_ac_at_peak, knee.flags))
    return SweepResult(rows=rows, seed=nsga.seed)


@dataclass
class CdContour:
    """Audio critical-distance map over (d_uc, f_u2) for piston sources."""

    d_uc: np.ndarray
    f_u2: np.ndarray
    l_pa_c: np.ndarray   # (n_duc, n_f)
    d_ac: np.ndarray
    aperture: np.ndarray
    f_a: float


def audio_cd_contour(d_uc_grid, f_u2_grid, f_a: float, v: float,
                     medium: Medium,
                     settings: nlfield.SolverSettings | None = None,
                     z_span=(0.05, 3.0), n_z: int = 40) -> CdContour:
    """Piston reference map: critical audio SPL and distance per cell.

    Both primary velocities are set to ``v``; the aperture of each cell
    follows from its critical-distance relation.
    """
    d_uc_grid = np.asarray(d_uc_grid, dtype=float)
    f_u2_grid = np.asarray(f_u2_grid, dtype=float)
    shape = (d_uc_grid.size, f_u2_grid.size)
    l_pa = np.empty(shape)
    d_ac = np.empty(shape)
    ap = np.empty(shape)
    for i, duc in enumerate(d_uc_grid):
        for j, fu2 in enumerate(f_u2_grid):
            a = radiator.aperture_for_cd(duc, fu2, medium)
            n = radiator.radial_sample_count(a, fu2, medium)
            prof = radiator.piston_profile(radiator.PistonSpec(a, v), n)
            pair = nlfield.PrimaryPair(*nlfield.lsb_am_pair(fu2, f_a),
                                       prof, prof)
            solver = nlfield.QuasilinearSolver(pair, medium, settings=settings)
            z = np.geomspace(z_span[0], max(z_span[1], 2.5 * duc), n_z)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", nlfield.BoundaryPeakWarning)
                cd = nlfield.find_audio_cd(solver.propagation_curve(z))
            l_pa[i, j] = cd.spl
            d_ac[i, j] = cd.distance
            ap[i, j] = a
    return CdContour(d_uc=d_uc_grid, f_u2=f_u2_grid, l_pa_c=l_pa,
                     d_ac=d_ac, aperture=ap, f_a=f_a)
