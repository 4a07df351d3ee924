import numpy as np
import pytest

from sppal import nlfield as nl
from sppal import optimizer as opt
from sppal import transducer as td
from sppal.errors import ParameterDomainError


def bi_objective(x):
    return (x[0] ** 2, (x[0] - 2.0) ** 2)


COARSE = nl.SolverSettings(ppw_axial=8, ppw_radial=8, audio_ppw=12,
                           truncation_db=45, z_max_cap=2.0)


@pytest.fixture(scope="module")
def cell_params():
    return opt.DesignParams(d_uc=0.45, f_u0=60e3, mode_m=8,
                            config=td.StackConfig.FULL,
                            r_p=9e-3, l_p=8e-3, r_h=0.75e-3)


class TestNsga2:
    def test_converges_on_analytic_problem(self):
        res = opt.nsga2(bi_objective, ([-5.0], [5.0]),
                        opt.NsgaConfig(pop=24, generations=25, seed=1),
                        hv_ref=(4.5, 4.5))
        assert res.x.min() > -0.1 and res.x.max() < 2.1
        # analytic dominated volume for reference point (4.5, 4.5)
        hv_true = 15.0 + 1.0 / 3.0 + 0.5 * 4.5
        assert res.hv_history[-1] == pytest.approx(hv_true, rel=0.02)

    def test_hypervolume_monotone(self):
        res = opt.nsga2(bi_objective, ([-5.0], [5.0]),
                        opt.NsgaConfig(pop=16, generations=20, seed=2),
                        hv_ref=(4.5, 4.5))
        assert np.all(np.diff(res.hv_history) >= -1e-12)

    def test_seed_reproducibility(self):
        cfg = opt.NsgaConfig(pop=16, generations=10, seed=9)
        r1 = opt.nsga2(bi_objective, ([-5.0], [5.0]), cfg)
        r2 = opt.nsga2(bi_objective, ([-5.0], [5.0]), cfg)
        assert np.array_equal(r1.x, r2.x)
        assert np.array_equal(r1.f, r2.f)
        assert np.array_equal(r1.hv_history, r2.hv_history)

    def test_front_non_dominated(self):
        res = opt.nsga2(bi_objective, ([-5.0], [5.0]),
                        opt.NsgaConfig(pop=16, generations=8, seed=4))
        f = res.f
        for i in range(f.shape[0]):
            for j in range(f.shape[0]):
                if i != j:
                    assert not opt._dominates(f[j], f[i])

    def test_config_validation(self):
        with pytest.raises(ParameterDomainError):
            opt.NsgaConfig(pop=7)
        with pytest.raises(ParameterDomainError):
            opt.NsgaConfig(pop=16, generations=0)

    def test_hypervolume_exact_small_set(self):
        # staircase front vs hand-computed union of dominated rectangles
        f = np.array([[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]])
        want = (4 - 1) * (4 - 3) + (4 - 2) * (3 - 2) + (4 - 3) * (2 - 1)
        assert opt.hypervolume_2d(f, (4.0, 4.0)) == pytest.approx(want)
        # dominated points must not add volume
        f2 = np.vstack([f, [[3.5, 3.5]]])
        assert opt.hypervolume_2d(f2, (4.0, 4.0)) == pytest.approx(want)


class TestEvaluateDesign:
    def test_deterministic(self, std_air, cell_params):
        x0, _ = td.langevin_initial_lengths(60e3, cell_params.config, 8e-3)
        p1 = opt.evaluate_design(cell_params, x0, std_air)
        p2 = opt.evaluate_design(cell_params, x0, std_air)
        assert p1.objectives == p2.objectives

    def test_reference_design_has_dual_resonance(self, std_air, cell_params):
        x0, _ = td.langevin_initial_lengths(60e3, cell_params.config, 8e-3)
        pt = opt.evaluate_design(cell_params, x0, std_air)
        assert pt.feasible
        assert pt.objectives[0] < 0
        assert "f_dist" in pt.derived

    def test_penalty_dominated_by_feasible(self, std_air, cell_params):
        x0, _ = td.langevin_initial_lengths(60e3, cell_params.config, 8e-3)
        feasible = opt.evaluate_design(cell_params, x0, std_air)
        # absurd lengths: chain evaluates but no dual resonance in band
        penalty = opt.evaluate_design(cell_params,
                                      np.array([1e-4, 1e-4, 1e-4, 1e-4]),
                                      std_air)
        if not penalty.feasible:
            assert penalty.objectives[0] == 0.0
            assert opt._dominates(np.array(feasible.objectives),
                                  np.array(penalty.objectives))

    def test_pareto_front_rejects_dominated(self, cell_params):
        good = opt.DesignPoint(cell_params, np.ones(4), (-2.0, 1000.0))
        bad = opt.DesignPoint(cell_params, np.ones(4), (-1.0, 2000.0))
        with pytest.raises(ParameterDomainError):
            opt.ParetoFront([good, bad])


class TestKneeSelection:
    def _pt(self, params, f1, f2, flags=()):
        return opt.DesignPoint(params, np.ones(4), (f1, f2), flags=flags)

    def test_min_f1_within_window(self, cell_params):
        pts = [self._pt(cell_params, -1.0, 900.0),
               self._pt(cell_params, -3.0, 1200.0),
               self._pt(cell_params, -4.0, 2000.0)]
        front = opt.ParetoFront(pts)
        knee = opt.select_knee(front, (800.0, 1250.0))
        assert knee.objectives == (-3.0, 1200.0)

    def test_tie_breaks_smaller_f2(self, cell_params):
        pts = [self._pt(cell_params, -3.0, 900.0),
               self._pt(cell_params, -3.0, 1100.0)]
        # mutually non-dominated requires distinct F1; craft with epsilon
        pts[1] = self._pt(cell_params, -3.0 + 1e-12, 1100.0)
        front = opt.ParetoFront([pts[0]])
        knee = opt.select_knee(front, (800.0, 1250.0))
        assert knee.objectives[1] == 900.0

    def test_none_when_window_missed(self, cell_params):
        front = opt.ParetoFront([self._pt(cell_params, -3.0, 2000.0)])
        assert opt.select_knee(front, (800.0, 1250.0)) is None


@pytest.mark.slow
class TestDesignPipeline:
    def test_optimize_and_audio_capability(self, std_air, cell_params):
        cfg = opt.NsgaConfig(pop=12, generations=4, seed=3)
        front = opt.optimize_lengths(cell_params, std_air, cfg)
        assert len(front.points) >= 1
        # trade-off shape: sorted by F2 ascending, F1 non-increasing
        pts = front.sorted_by_f2()
        f1s = [p.objectives[0] for p in pts]
        assert all(f1s[i] >= f1s[i + 1] - 1e-15 for i in range(len(f1s) - 1))

        knee = opt.select_knee(front, (800.0, 8000.0))
        assert knee is not None
        cap = opt.audio_capability(knee, std_air, [1000.0], settings=COARSE)
        assert cap.carrier_hz == pytest.approx(knee.derived["f_r2"], rel=1e-6)
        assert np.isfinite(cap.peak_spl)
        assert cap.d_ac_at_peak > 0

    def test_vanishing_drive_guard(self, std_air, cell_params):
        # effective velocities below the guard floor produce -inf SPL
        # rather than a numerical failure
        cfg = opt.NsgaConfig(pop=12, generations=4, seed=3)
        front = opt.optimize_lengths(cell_params, std_air, cfg)
        knee = opt.select_knee(front, (800.0, 8000.0))
        cap = opt.audio_capability(knee, std_air, [1000.0],
                                   drive_voltage=1e-30, settings=COARSE)
        assert cap.peak_spl == -np.inf

    def test_sweep_single_cell_deterministic(self, std_air):
        grid = {"d_uc": (0.45,), "f_u0": (60e3,), "mode_m": (8,),
                "config": (td.StackConfig.FULL,), "r_p": (9e-3,),
                "r_h": (0.75e-3,)}
        cfg = opt.NsgaConfig(pop=8, generations=2, seed=11)
        r1 = opt.design_sweep(grid, std_air, cfg, f_a_grid=[1000.0],
                              settings=COARSE, f_dist_window=(800.0, 8000.0))
        r2 = opt.design_sweep(grid, std_air, cfg, f_a_grid=[1000.0],
                              settings=COARSE, f_dist_window=(800.0, 8000.0))
        assert r1.table() == r2.table()
        assert len(r1.rows) == 1

    def test_sweep_records_window_miss(self, std_air):
        grid = {"d_uc": (0.45,), "f_u0": (60e3,), "mode_m": (8,),
                "config": (td.StackConfig.FULL,), "r_p": (9e-3,),
                "r_h": (0.75e-3,)}
        cfg = opt.NsgaConfig(pop=8, generations=2, seed=11)
        res = opt.design_sweep(grid, std_air, cfg, f_a_grid=[1000.0],
                               settings=COARSE, f_dist_window=(1.0, 2.0))
        assert res.rows[0].flags == ("no_design_in_window",)
        assert res.rows[0].l_pa_c is None

    def test_empty_grid(self, std_air):
        res = opt.design_sweep({"d_uc": (), "f_u0": (60e3,)}, std_air,
                               opt.NsgaConfig(pop=8, generations=1, seed=0))
        assert res.rows == []
