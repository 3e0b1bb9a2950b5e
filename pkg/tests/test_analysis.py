import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from qdetcal import (
    BracketError,
    Coherent,
    CurveSpec,
    DomainError,
    EnergyMismatch,
    Fock,
    HeraldedSinglePhoton,
    Homodyne,
    KOutcome,
    OnOff,
    asymptotic_error_report,
    figure_curves,
    figure_sweep,
    find_crossover,
    fisher_information,
    fixed_energy_sweep,
    heralding_threshold,
    koutcome_optimality_scan,
    threshold_sensitivity,
)
from qdetcal.analysis import figure_eta_grid
from qdetcal.errors import NoThreshold
from qdetcal.export import curves_to_csv, read_curves_csv

GOLDEN = Path(__file__).parent / "golden"

# sign change bracketed by a 1e-3 scan, then bisection (tests/oracles.py grid scan)
FIG3_FOCK4_CROSSOVER = 0.8189958962498328
FIG3_SINGLE_PHOTON_CROSSOVER = 0.682534632764253
HOMODYNE_THRESHOLD = 0.7656624430674128


class TestSweep:
    def test_single_point(self):
        (c,) = fixed_energy_sweep([(Fock(1), OnOff(), 1)], [0.5])
        assert c.values[0].value == pytest.approx(4.0, rel=1e-15)
        assert c.repetitions_per_unit_energy == Fraction(1)

    def test_energy_mismatch(self):
        with pytest.raises(EnergyMismatch):
            fixed_energy_sweep([(Fock(1), OnOff(), 2), (Fock(3), OnOff(), 1)], [0.5])
        # allowed when the check is switched off
        fixed_energy_sweep([(Fock(1), OnOff(), 2), (Fock(3), OnOff(), 1)], [0.5], check_energy=False)

    def test_rational_repetitions(self):
        curves = fixed_energy_sweep(
            [(Coherent(1.5), OnOff(), Fraction(2, 3)), (Fock(1), OnOff(), 1)], [0.3], check_energy=True
        )
        assert curves[0].repetitions_per_unit_energy == Fraction(2, 3)

    def test_additivity(self):
        for detector in (OnOff(0.05), KOutcome(3), Homodyne()):
            for M in (1, 3, 7):
                (c,) = fixed_energy_sweep([(Fock(2), detector, M)], [0.2, 0.6], check_energy=False)
                for eta, r in zip(c.eta_grid, c.values):
                    assert r.value == M * fisher_information(Fock(2), detector, eta).value

    def test_thread_count_does_not_change_results(self, monkeypatch):
        specs, _ = figure_curves(3)
        grid = [0.2, 0.5, 0.8]
        monkeypatch.setenv("QDETCAL_THREADS", "1")
        a = fixed_energy_sweep(specs, grid)
        monkeypatch.setenv("QDETCAL_THREADS", "4")
        b = fixed_energy_sweep(specs, grid)
        assert curves_to_csv(a) == curves_to_csv(b)

    def test_figure1_low_efficiency_match(self):
        curves = {c.label: c.array() for c in figure_sweep(1)}
        assert abs(curves["fock:3"][0] - curves["3xfock:1"][0]) / curves["3xfock:1"][0] <= 0.02


class TestFigureConfigurations:
    @pytest.mark.parametrize("fig, n_curves, matched", [(1, 4, True), (2, 3, True), (3, 4, True), (4, 3, False)])
    def test_shapes(self, fig, n_curves, matched):
        specs, m = figure_curves(fig)
        assert len(specs) == n_curves and m is matched

    def test_grid(self):
        g = figure_eta_grid()
        assert len(g) == 99 and g[0] == 0.01 and g[-1] == 0.99

    def test_unknown(self):
        with pytest.raises(DomainError):
            figure_curves(5)

    @pytest.mark.parametrize("fig", [1, 2, 3, 4])
    def test_matches_golden_file(self, fig):
        golden = read_curves_csv((GOLDEN / f"fig{fig}.csv").read_text())
        fresh = read_curves_csv(curves_to_csv(figure_sweep(fig)))
        assert [(r["eta"], r["curve_label"]) for r in fresh] == [(r["eta"], r["curve_label"]) for r in golden]
        tol = 1e-12 if fig != 3 else 1e-9
        for a, b in zip(fresh, golden):
            assert a["result"].value == pytest.approx(b["result"].value, rel=tol)

    def test_figure3_coherent_dominates_at_low_efficiency(self):
        curves = {c.label: c for c in figure_sweep(3, [0.1])}
        coh = curves["coherent:4"].values[0].value
        assert coh == pytest.approx(40.0, rel=1e-14)
        for label in ("4xfock:1", "2xfock:2", "fock:4"):
            assert curves[label].values[0].value < coh

    def test_figure4_one_over_e_meets_coherent_near_unity(self):
        curves = {c.label: c.array() for c in figure_sweep(4, [0.99, 1.0])}
        assert curves["heralded:1/e"][-1] == pytest.approx(curves["coherent:1"][-1], rel=1e-12)
        assert curves["heralded:0.8"][-1] > curves["coherent:1"][-1]

    def test_figure2_coherent_closer_than_single_photons(self):
        curves = {c.label: c for c in figure_sweep(2, [0.01])}
        f5 = curves["fock:5"].values[0].value
        assert curves["coherent:5"].values[0].value / f5 > curves["5xfock:1"].values[0].value / f5


class TestCrossover:
    def test_no_crossing_single_photon_vs_coherent(self):
        a = CurveSpec(Fock(1), OnOff(), 1)
        b = CurveSpec(Coherent(1.0), OnOff(), 1)
        res = find_crossover(a, b, (0.01, 0.99))
        assert res.eta_star is None and res.sign_changes == 0 and res.residual > 0

    def test_no_crossing_three_photons_vs_three_singles(self):
        a = CurveSpec(Fock(3), OnOff(), 1)
        b = CurveSpec(Fock(1), OnOff(), 3)
        assert find_crossover(a, b, (0.01, 0.99)).eta_star is None

    def test_homodyne_fock4_vs_coherent4_golden(self):
        a = CurveSpec(Fock(4), Homodyne(), 1)
        b = CurveSpec(Coherent(4.0), Homodyne(), 1)
        res = find_crossover(a, b, (0.3, 0.99))
        assert res.eta_star == pytest.approx(FIG3_FOCK4_CROSSOVER, abs=2e-8)
        assert 0.818 < res.eta_star < 0.819
        # the difference changes sign across the root
        assert (a(res.eta_star - 1e-4) - b(res.eta_star - 1e-4)) * (a(res.eta_star + 1e-4) - b(res.eta_star + 1e-4)) < 0

    def test_bracket_invariance(self):
        a = CurveSpec(Fock(4), Homodyne(), 1)
        b = CurveSpec(Coherent(4.0), Homodyne(), 1)
        for bracket in ((0.75, 0.9), (0.81, 0.83), (0.8185, 0.8195)):
            assert find_crossover(a, b, bracket).eta_star == pytest.approx(FIG3_FOCK4_CROSSOVER, abs=1e-8)

    def test_single_photon_homodyne_crossover(self):
        a = CurveSpec(Fock(1), Homodyne(), 4)
        b = CurveSpec(Coherent(4.0), Homodyne(), 1)
        res = find_crossover(a, b, (0.3, 0.99))
        assert res.eta_star == pytest.approx(FIG3_SINGLE_PHOTON_CROSSOVER, abs=2e-8)

    def test_plain_callables(self):
        res = find_crossover(lambda e: e, lambda e: 1 - e, (0.0, 1.0))
        assert res.eta_star == pytest.approx(0.5, abs=1e-9)

    def test_divergent_endpoint(self):
        a = CurveSpec(Fock(1), OnOff(), 1)
        b = CurveSpec(Fock(2), OnOff(), 1)
        with pytest.raises(BracketError):
            find_crossover(a, b, (0.5, 1.0))

    def test_bad_bracket(self):
        with pytest.raises(DomainError):
            find_crossover(lambda e: e, lambda e: e, (0.6, 0.4))


class TestThreshold:
    def test_onoff_is_one_over_e(self):
        assert heralding_threshold(OnOff()) == pytest.approx(1 / math.e, abs=1e-9)

    def test_homodyne(self):
        xi = heralding_threshold(Homodyne())
        assert xi == pytest.approx(HOMODYNE_THRESHOLD, abs=1e-8)
        assert abs(xi - 0.765) <= 0.015

    def test_sensitivity_small(self):
        s = threshold_sensitivity(Homodyne())
        assert s.eta_eval == 1 - 1e-4 and s.eta_alt == 1 - 1e-3
        assert s.shift < 0.005

    def test_self_reference(self):
        for detector in (OnOff(0.0), KOutcome(3)):
            assert heralding_threshold(detector, HeraldedSinglePhoton(1.0), 0.7) == pytest.approx(1.0, abs=1e-9)

    def test_monotone_in_reference(self):
        refs = [Coherent(m) for m in (0.6, 0.8, 1.0, 1.2)]
        xis = [heralding_threshold(OnOff(), r, 0.8) for r in refs]
        assert all(b > a for a, b in zip(xis, xis[1:]))

    def test_not_reachable(self):
        with pytest.raises(NoThreshold):
            heralding_threshold(Homodyne(), eta_eval=0.5)

    def test_closed_form_onoff(self):
        # xi / (eta (1 - xi eta)) = 1 / (e^eta - 1)  =>  xi = eta / (e^eta - 1 + eta^2)
        for eta in (0.3, 0.6, 0.9):
            expected = eta / (math.expm1(eta) + eta * eta)
            assert heralding_threshold(OnOff(), eta_eval=eta) == pytest.approx(expected, abs=1e-9)


class TestReports:
    def test_asymptotic_rows(self):
        (row,) = asymptotic_error_report(Fock(5), 0.05, [0.001])
        assert row.relative_error < 0.01
        (row,) = asymptotic_error_report(Fock(1), 0.0, [0.001])
        assert row.relative_error == pytest.approx(0.001, rel=1e-9)
        (row,) = asymptotic_error_report(Coherent(1.0), 0.0, [0.001])
        assert row.relative_error < 0.001

    def test_asymptotic_domain(self):
        with pytest.raises(DomainError):
            asymptotic_error_report(Fock(1), 0.0, [0.5])

    def test_optimality_scan_best_n_depends_on_eta(self):
        rows = koutcome_optimality_scan(3, np.round(np.arange(1, 10) * 0.1, 12))
        best = {r.eta: r.best_n for r in rows}
        assert best[0.1] == 13 and best[0.5] == 4 and best[0.7] == 3 and best[0.9] == 2
        assert len(set(best.values())) > 1
