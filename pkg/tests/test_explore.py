import math

import numpy as np
import pytest

from qotto.cycle import Mode, run_otto
from qotto.errors import DomainError
from qotto.explore import (
    DEFAULT_A_SI,
    SweepTable,
    TcPolicy,
    TrapUnits,
    fig2_temperatures,
    fig3_temperatures,
    fmt,
    g_cri,
    golden_section_max,
    nbar_temperature,
    optimize_g,
    random_machines,
    sweep_fig2,
    sweep_fig3,
)
from qotto.spectrum import box_level


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(True) == "true" and fmt(Mode.ENGINE) == "Engine"


def test_g_cri_units():
    assert g_cri(2.0) == pytest.approx(0.5)
    assert g_cri(1.0) * 2.0 == pytest.approx(2.0)   # 2 hbar^2/(m L_h) = 1 with L_h = 2


def test_hot_tls_policy():
    T_h, T_c = fig2_temperatures(1.0)
    assert T_h / T_c == pytest.approx(12.0)
    e = box_level(np.arange(1, 60), 2.0)
    w = np.exp(-(e - e[0]) / T_h)
    assert w[2:].sum() / w.sum() == pytest.approx(1e-6, rel=1e-9)
    # independent of r
    assert fig2_temperatures(3.0) == (T_h, T_c)


def test_box_gap_and_fixed_policies():
    T_h, T_c = fig2_temperatures(2.0, policy=TcPolicy("box_gap", 0.2))
    assert T_c == pytest.approx(0.2 * (box_level(2, 4.0) - box_level(1, 4.0)))
    assert fig2_temperatures(2.0, 10.0, TcPolicy("fixed", 0.3)) == (3.0, 0.3)
    with pytest.raises(DomainError):
        TcPolicy("other")
    with pytest.raises(DomainError):
        TcPolicy("hot_tls", 2.0)


def test_sweep_fig2_tables():
    c, q = sweep_fig2([1.0, 2.0], [0.0, 10.0])
    assert c.shape == q.shape == (2, 2)
    # no barrier: the quantum box cycle equals the ideal-gas cycle efficiency
    eta_q, eta_c = q.values("eta"), c.values("eta")
    assert eta_q.shape == (2, 2)
    assert eta_q[1, 0] == pytest.approx(eta_c[1, 0], rel=1e-12)
    assert q.column("mode")[0, 1] == "Engine" and c.column("mode")[0, 0] == "Broken"
    text = q.to_csv()
    lines = text.splitlines()
    assert lines[0].split(",")[:2] == ["r", "g_over_gcri"] and len(lines) == 5


def test_sweep_table_rejects_ragged_cells():
    with pytest.raises(ValueError):
        SweepTable([("x", [1.0, 2.0])], [{"W": 1.0}], {})


def test_golden_section_finds_parabola_peak():
    trace = golden_section_max(lambda x: -(x - 0.3) ** 2, -1.0, 2.0, 1e-8)
    best = max(trace, key=lambda t: t[1])[0]
    assert best == pytest.approx(0.3, abs=1e-7)


def test_optimize_g_infeasible_range():
    T_h, T_c = fig2_temperatures(0.5)
    opt = optimize_g(0.5, T_h, T_c, g_bounds=(-0.1, 0.1), n_grid=8)
    assert not opt.feasible and opt.argmax is None and "infeasible" in opt.metadata


def test_optimize_g_beats_bare_box():
    T_h, T_c = fig2_temperatures(2.0)
    opt = optimize_g(2.0, T_h, T_c, n_grid=32, rel_tol=1e-4)
    assert opt.feasible and opt.objective_value > 0.75
    assert opt.metadata["W_floor"] == pytest.approx(1e-6 * T_h)


def test_optimize_g_rejects_bad_input():
    with pytest.raises(DomainError):
        optimize_g(2.0, 1.0, 0.1, g_bounds=(1.0, -1.0))
    with pytest.raises(DomainError):
        optimize_g(2.0, 1.0, 0.1, objective="fastest")


def test_random_machines_reproducible():
    a = [run_otto(*m).W for m in random_machines(20, seed=7)]
    b = [run_otto(*m).W for m in random_machines(20, seed=7)]
    assert a == b
    for spec_h, spec_c, T_h, T_c in random_machines(20, seed=7):
        assert 1.01 <= T_h / T_c <= 10.0 and len(spec_h) == 5


def test_nbar_temperature_inverts_bose_occupation():
    T = nbar_temperature(0.033, 1.3)
    assert 1.0 / math.expm1(1.3 / T) == pytest.approx(0.033, rel=1e-14)


def test_trap_units_and_fig3_temperatures():
    tu = TrapUnits()
    assert DEFAULT_A_SI / tu.length == pytest.approx(24.27296, rel=1e-6)
    T_h, T_c = fig3_temperatures(1.7, 1.0)
    assert T_c == pytest.approx(math.sqrt(1.7) / math.log1p(1 / 0.033), rel=1e-14)
    assert T_h == pytest.approx(41.6 * T_c, rel=1e-15)
    assert fig3_temperatures(1.7, 1.0, omega_ref="trap")[1] == pytest.approx(
        1.0 / math.log1p(1 / 0.033))
    with pytest.raises(DomainError):
        fig3_temperatures(1.7, 1.0, omega_ref="other")


def test_sweep_fig3_single_cell():
    c, q = sweep_fig3([1.7], [1.0], classical_schedule=(1, 2))
    assert q.column("mode")[0, 0] == "Engine" and q.values("W")[0, 0] < 0
    assert c.values("xi_max")[0, 0] == 2.0
    assert "W_extrapolated" in c.columns and len(list(c.rows())) == 1
