"""Acceptance criteria 1-10, one or more tests per criterion.

Runtime budgets are asserted alongside the numerical tolerances. A summary
line per criterion is printed at the end of the pytest run.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from qotto.cycle import Mode, carnot_audit, classical_otto, run_otto, tls_summary
from qotto.explore import (
    FIG3_CLASSICAL_SCHEDULE,
    TcPolicy,
    delta_well_cycle,
    fig2_temperatures,
    fig3_temperatures,
    g_cri,
    ion_trap_pair,
    optimize_g,
    random_machines,
)
from qotto.limits import (
    classical_limit_series,
    potential_cycle,
    thermal_spectra,
    verify_scaling_relation,
)
from qotto.potentials import Harmonic, IonTrap, SquareWell, SquareWellDelta
from qotto.spectrum import solve_delta_well, solve_square_well


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# -- 1 -----------------------------------------------------------------------

@pytest.mark.criterion(1, "homogeneous scaling: harmonic 0.5, box r=2 0.75")
@pytest.mark.parametrize("T_h, T_c", [(4.0, 1.0), (10.0, 0.5), (0.9, 0.3)])
def test_c1_harmonic_efficiency(T_h, T_c):
    with Timer() as t:
        res = potential_cycle(Harmonic(2.0), Harmonic(1.0), T_h, T_c)
    assert res.mode is Mode.ENGINE
    assert abs(res.eta_engine - 0.5) < 1e-9
    assert t.elapsed < 1.0


@pytest.mark.criterion(1, "homogeneous scaling: harmonic 0.5, box r=2 0.75")
@pytest.mark.parametrize("T_h, T_c", [(60.0, 5.0), (10.0, 2.0), (3.0, 0.5)])
def test_c1_box_efficiency(T_h, T_c):
    r, gamma = 2.0, 3.0
    with Timer() as t:
        res = potential_cycle(SquareWell(2.0), SquareWell(2.0 * r), T_h, T_c)
    assert res.mode is Mode.ENGINE
    assert abs(res.eta_engine - 0.75) < 1e-9
    assert abs(res.eta_engine - (1 - r ** (1 - gamma))) < 1e-9
    assert t.elapsed < 1.0


# -- 2 and 3 -----------------------------------------------------------------

@pytest.fixture(scope="module")
def timed_suite():
    with Timer() as t:
        results = [run_otto(*m) for m in random_machines(1000, seed=0)]
        audits = [carnot_audit(r) for r in results]
    return results, audits, t.elapsed


@pytest.mark.criterion(2, "energy conservation and second law, 1000 random machines")
def test_c2_conservation_and_second_law(timed_suite):
    results, _, elapsed = timed_suite
    assert len(results) >= 1000
    for res in results:
        big = max(abs(res.W), abs(res.Q_h), abs(res.Q_c))
        assert abs(res.W + res.Q_h + res.Q_c) < 1e-12 * big
        assert -res.Q_h / res.T_h - res.Q_c / res.T_c >= -1e-12
    assert elapsed < 10.0


@pytest.mark.criterion(3, "Carnot audit, zero violations in the random suite")
def test_c3_engine_efficiency_below_carnot(timed_suite):
    results, _, _ = timed_suite
    engines = [r for r in results if r.mode is Mode.ENGINE]
    assert engines
    for res in engines:
        assert res.eta_engine <= 1 - res.T_c / res.T_h + 1e-12


@pytest.mark.criterion(3, "Carnot audit, zero violations in the random suite")
def test_c3_single_level_bound(timed_suite):
    results, audits, _ = timed_suite
    violations = [(i, v) for i, (res, a) in enumerate(zip(results, audits))
                  if res.mode is Mode.ENGINE for v in a.violations]
    assert violations == []


# -- 4 -----------------------------------------------------------------------

TLS_POLICY = TcPolicy("hot_tls", 1e-7)


@pytest.mark.criterion(4, "two-level closed form and gap-ratio identity")
def test_c4_tls_closed_form():
    checked_eta = 0
    with Timer() as t:
        for r in (0.8, 1.0, 1.5, 3.5):
            T_h, T_c = fig2_temperatures(r, 12.0, TLS_POLICY)
            for g in (-2.0, -0.5, 0.5, 2.0, 10.0):
                spec_h, spec_c = thermal_spectra(SquareWell(2.0),
                                                 SquareWellDelta(2.0 * r, g * g_cri(r)), T_h, T_c)
                s = tls_summary(spec_h, spec_c, T_h, T_c, r=r)
                assert s.third_level_population < 1e-6, (r, g)
                assert s.identity_residual < 1e-9, (r, g)
                res = run_otto(spec_h, spec_c, T_h, T_c)
                if res.mode is Mode.ENGINE:
                    assert abs(res.eta_engine - (1 - s.delta_c / s.delta_h)) < 1e-3, (r, g)
                    checked_eta += 1
    assert checked_eta >= 4
    assert t.elapsed < 5.0


# -- 5 -----------------------------------------------------------------------

@pytest.mark.criterion(5, "parity invariance of the delta well")
def test_c5_parity_invariance():
    L, n = 2.0, 20
    gs = (-1.0, 1.0, 10.0, 1e6)
    with Timer() as t:
        bare = solve_square_well(L, n + 2).energies
        odd_bare = bare[1::2]                       # sine states
        evens = []
        for g in gs:
            spec = solve_delta_well(L, g, n)
            e, par = spec.energies, np.asarray(spec.parities)
            odd = np.sort(e[par == "odd"])
            even = np.sort(e[par == "even"])
            assert np.all(np.abs(odd - odd_bare[:odd.size]) <= 1e-12 * odd_bare[:odd.size])
            lower = np.concatenate(([-np.inf], odd_bare[:even.size - 1]))
            assert np.all(even >= lower) and np.all(even <= odd_bare[:even.size])
            evens.append(even[: n // 2 - 1])
    for a, b in zip(evens[:-1], evens[1:]):
        assert np.all(b >= a)
    assert t.elapsed < 1.0


# -- 6 -----------------------------------------------------------------------

@pytest.mark.criterion(6, "scaling relation hbar/xi vs xi^2 V")
@pytest.mark.parametrize("potential", [SquareWell(2.0), SquareWellDelta(2.0, 1.0),
                                       IonTrap(1.0, 1.7, 24.27)],
                         ids=["square_well", "delta_well", "ion_trap"])
def test_c6_scaling_relation(potential):
    with Timer() as t:
        rep = verify_scaling_relation(potential, (2, 10, 100), n_levels=10, tol=1e-8)
    assert rep.passed, rep.max_rel_error
    assert t.elapsed < 30.0


# -- 7 -----------------------------------------------------------------------

@pytest.mark.criterion(7, "classical limit of the r=2 box machine")
def test_c7_classical_limit():
    T_h, T_c = 60.0, 5.0
    with Timer() as t:
        s = classical_limit_series(SquareWell(2.0), SquareWell(4.0), T_h, T_c)
    assert s.converged_at is not None and s.converged_at <= 100
    classical = classical_otto(2.0, 3.0, T_h, T_c).W
    w = s.work_per_xi2[s.xi_values.index(s.converged_at)]
    assert abs(w - classical) < 1e-3 * abs(classical)
    assert abs(s.classical_W - classical) < 1e-3 * abs(classical)
    assert t.elapsed < 120.0


# -- 8 -----------------------------------------------------------------------

@pytest.mark.criterion(8, "mode change and broken-machine repair")
def test_c8a_broken_machine_repaired():
    r = 1.0
    T_h, T_c = fig2_temperatures(r, 12.0)
    res = delta_well_cycle(r, 10.0 * g_cri(r), T_h, T_c)
    assert res.mode is Mode.ENGINE
    assert classical_otto(r, 3.0, T_h, T_c).mode is Mode.BROKEN


@pytest.mark.criterion(8, "mode change and broken-machine repair")
def test_c8b_refrigerator_turned_engine():
    r = 4.0
    assert r > math.sqrt(12.0)
    T_h, T_c = fig2_temperatures(r, 12.0)
    res = delta_well_cycle(r, -2.0 * g_cri(r), T_h, T_c)
    assert res.mode is Mode.ENGINE
    assert classical_otto(r, 3.0, T_h, T_c).mode is Mode.REFRIGERATOR


@pytest.mark.criterion(8, "mode change and broken-machine repair")
def test_c8c_ion_trap_sign_flip():
    kappa_c, omega_ratio = 1.7, 1.0
    T_h, T_c = fig3_temperatures(kappa_c, omega_ratio, 41.6, 0.033)
    hot, cold = ion_trap_pair(kappa_c, omega_ratio)
    quantum = potential_cycle(hot, cold, T_h, T_c)
    assert quantum.W < 0
    s = classical_limit_series(hot, cold, T_h, T_c, FIG3_CLASSICAL_SCHEDULE)
    assert s.work_per_xi2[-1] > 0, s.trend()
    assert s.converged, s.trend()


# -- 9 -----------------------------------------------------------------------

@pytest.mark.criterion(9, "optimizer sanity at r=2 and r=0.8")
def test_c9_optimizer_r2():
    r = 2.0
    T_h, T_c = fig2_temperatures(r)
    with Timer() as t:
        opt = optimize_g(r, T_h, T_c)
    assert opt.feasible
    assert opt.objective_value >= 0.75
    assert opt.metadata["W_floor_applies"] and opt.metadata["W_floor"] > 0
    assert t.elapsed < 120.0


@pytest.mark.criterion(9, "optimizer sanity at r=2 and r=0.8")
def test_c9_optimizer_r08():
    r = 0.8
    T_h, T_c = fig2_temperatures(r)
    with Timer() as t:
        opt = optimize_g(r, T_h, T_c)
    assert opt.feasible
    res = delta_well_cycle(r, opt.argmax * g_cri(r), T_h, T_c)
    assert res.mode is Mode.ENGINE
    assert t.elapsed < 120.0


# -- 10 ----------------------------------------------------------------------

CONFIGS = {
    "cycle": """command = cycle
[potential_h]
shape = harmonic
omega = 2
[potential_c]
shape = harmonic
omega = 1
[bath]
T_h = 4
T_c = 1
""",
    "sweep": """command = sweep-fig2
[sweep]
r_grid = 0.8, 1, 2, 4
g_grid = -2, 0, 10
""",
    "limit": """command = classical-limit
[potential_h]
shape = square_well
L = 2
[potential_c]
shape = square_well
L = 4
[bath]
T_h = 60
T_c = 5
[limits]
xi_schedule = 1, 2, 4, 8
""",
    "audit": """command = audit
[audit]
n_trials = 200
seed = 3
""",
}


def _run_cli(cfg_path, out):
    return subprocess.run([sys.executable, "-m", "qotto", "--config", str(cfg_path),
                           "--out", str(out)], capture_output=True, text=True)


@pytest.mark.criterion(10, "byte-reproducible outputs")
@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_c10_determinism(tmp_path, name):
    cfg = tmp_path / f"{name}.cfg"
    cfg.write_text(CONFIGS[name])
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        proc = _run_cli(cfg, out)
        assert proc.returncode in (0, 3), proc.stderr
    files_a = sorted(p.name for p in outs[0].iterdir())
    files_b = sorted(p.name for p in outs[1].iterdir())
    assert files_a == files_b
    assert any(f.endswith(".csv") for f in files_a)
    for f in files_a:
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes(), f
