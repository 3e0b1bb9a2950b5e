"""Acceptance criteria, one test each.

Every test records a single ``PASS``/``FAIL`` line (shown in the pytest
terminal summary under "acceptance criteria") before asserting, so the line is
printed whatever the outcome.  Runtimes are wall-clock and asserted against
each criterion's budget.
"""

import math
import random
import time

import numpy as np
import pytest

from conftest import record_acceptance
from qdetcal import (
    Coherent,
    EstimationRun,
    Fock,
    FockMixture,
    OnOff,
    asymptotic_error_report,
    figure_sweep,
    fisher_homodyne_coherent,
    fisher_homodyne_coherent_quadrature,
    fisher_homodyne_fock,
    fisher_koutcome,
    fisher_koutcome_fock,
    fisher_onoff_coherent,
    fisher_onoff_fock,
    fisher_onoff_heralded,
    fisher_onoff_mixture,
    fisher_onoff_small_eta,
    koutcome_claimed_closed_form,
    pdf_coherent_lossy,
    pdf_fock_lossy,
    validate_crb,
)
from qdetcal.cli import main
from qdetcal.core import standard_eta_grid
from qdetcal.homodyne import pdf_fock_lossy_derivative

import oracles


class Check:
    """Collects sub-results and runtime for one criterion and records the summary line."""

    def __init__(self, number: int, budget: float):
        self.number = number
        self.budget = budget
        self.parts: list[tuple[str, bool]] = []
        self.t0 = time.perf_counter()

    def part(self, text: str, ok: bool) -> bool:
        self.parts.append((text, bool(ok)))
        return bool(ok)

    def finish(self) -> bool:
        elapsed = time.perf_counter() - self.t0
        self.part(f"runtime {elapsed:.2f} s < {self.budget:g} s", elapsed < self.budget)
        ok = all(p for _, p in self.parts)
        detail = "; ".join(f"{t} [{'ok' if p else 'FAILED'}]" for t, p in self.parts)
        record_acceptance(f"criterion {self.number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    def failed_parts(self) -> list[str]:
        return [t for t, p in self.parts if not p]


def _run_cli(capsys, *argv):
    import json

    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_criterion_01_onoff_threshold(capsys):
    c = Check(1, 1.0)
    code, doc = _run_cli(capsys, "threshold", "--detector", "onoff", "--reference", "coherent:1")
    xi = doc["xi_star"]
    c.part(f"exit {code}", code == 0)
    c.part(f"xi* = {xi:.10f}, |xi* - 1/e| = {abs(xi - 1 / math.e):.1e} <= 1e-6", abs(xi - 1 / math.e) <= 1e-6)
    assert c.finish(), c.failed_parts()


def test_criterion_02_homodyne_threshold(capsys):
    c = Check(2, 30.0)
    code, doc = _run_cli(capsys, "threshold", "--detector", "homodyne", "--reference", "coherent:1")
    xi = doc["xi_star"]
    sens = doc["sensitivity"]
    c.part(f"exit {code}", code == 0)
    c.part(f"xi* = {xi:.6f} within 0.765 +/- 0.015", abs(xi - 0.765) <= 0.015)
    # the sensitivity report always accompanies the result
    c.part(
        f"sensitivity: eta {doc['eta_eval']} -> {sens['eta_alt']} gives xi* {sens['xi_star_alt']:.6f}, "
        f"shift {sens['shift']:.1e} < 0.005",
        sens["shift"] < 0.005,
    )
    assert c.finish(), c.failed_parts()


def test_criterion_03_figure1_properties():
    c = Check(3, 1.0)
    curves = {cv.label: cv for cv in figure_sweep(1)}
    grid = np.array(curves["fock:3"].eta_grid)
    f1 = curves["3xfock:1"].array() / 3
    f3 = curves["fock:3"].array()
    fcoh = curves["3xcoherent:1"].array() / 3
    c.part(f"{len(grid)}-point grid", len(grid) == 99)
    c.part("F_1 >= F_coh(1) everywhere", bool(np.all(f1 >= fcoh)))
    c.part("F_3 <= 3 F_1 everywhere", bool(np.all(f3 <= 3 * f1)))
    low = [e for e in (0.001, 0.005, 0.01)]
    gaps = [
        abs(fisher_onoff_fock(3, e).value - 3 * fisher_onoff_fock(1, e).value) / (3 * fisher_onoff_fock(1, e).value)
        for e in low
    ]
    c.part(f"max |F_3 - 3F_1|/(3F_1) for eta <= 0.01: {max(gaps):.4f} <= 0.02", max(gaps) <= 0.02)
    assert c.finish(), c.failed_parts()


def test_criterion_04_figure2_properties():
    c = Check(4, 1.0)
    delta = 0.05
    etas = np.linspace(1e-4, 0.1, 1000)
    excess = [fisher_onoff_fock(5, e, delta).value - 5 * fisher_onoff_fock(1, e, delta).value for e in etas]
    where = etas[np.array(excess) > 0]
    c.part(
        f"F_5 > 5F_1 for eta in [{where.min():.4f}, {where.max():.4f}]" if where.size else "F_5 > 5F_1 nowhere",
        where.size > 0,
    )
    f5 = fisher_onoff_fock(5, 0.01, delta).value
    fc = fisher_onoff_coherent(5.0, 0.01, delta).value
    c.part(f"|F_coh(5) - F_5|/F_5 at eta=0.01: {abs(fc - f5) / f5:.4f} <= 0.10", abs(fc - f5) / f5 <= 0.10)
    assert c.finish(), c.failed_parts()


@pytest.mark.xfail(
    strict=True,
    reason="4 F_1^hom crosses 4/eta at eta* = 0.68253, so (a) fails on [0.65, 0.6825); see notes",
)
def test_criterion_05_figure3_properties():
    c = Check(5, 60.0)
    etas = np.round(np.arange(650, 901) * 1e-3, 12)
    margins = np.array([4 * fisher_homodyne_fock(1, e).value - 4 / e for e in etas])
    bad = etas[margins <= 0]
    c.part(
        "4F_1 > 4/eta on [0.65, 0.9]"
        + (
            f": violated at {bad.size} of {etas.size} points, eta in [{bad.min():.3f}, {bad.max():.3f}], "
            f"worst margin {margins.min():.4f}"
            if bad.size
            else ""
        ),
        bad.size == 0,
    )
    at = {cv.label: cv.values[0].value for cv in figure_sweep(3, [0.1])}
    fock = max(at["4xfock:1"], at["2xfock:2"], at["fock:4"])
    c.part(
        f"eta=0.1: coherent {at['coherent:4']:.4g} > Fock fixed-energy max {fock:.4g}",
        at["coherent:4"] > fock and at["coherent:4"] == pytest.approx(40.0),
    )
    ok = c.finish()
    # part (b) must hold regardless; only part (a) is the documented failure
    assert c.parts[1][1], c.failed_parts()
    assert ok, c.failed_parts()


def test_criterion_06_asymptotics():
    c = Check(6, 1.0)
    for probe in (Fock(1), Fock(5), Coherent(1.0), Coherent(5.0)):
        (row,) = asymptotic_error_report(probe, 0.05, [0.001])
        c.part(f"{probe.label()}: {row.relative_error:.2e} < 1%", row.relative_error < 0.01)
    assert c.finish(), c.failed_parts()


def test_criterion_07_homodyne_coherent_crossvalidation():
    c = Check(7, 10.0)
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        for eta in (0.1, 0.5, 0.9):
            exact = fisher_homodyne_coherent(alpha, eta).value
            quad = fisher_homodyne_coherent_quadrature(alpha, eta).value
            worst = max(worst, abs(quad - exact) / exact)
    c.part(f"9-point grid, max relative gap {worst:.1e} <= 1e-6", worst <= 1e-6)
    assert c.finish(), c.failed_parts()


def test_criterion_08_koutcome_identity():
    c = Check(8, 1.0)
    worst, count = 0.0, 0
    for n in range(0, 11):
        for K in range(2, n + 2):
            for eta in np.round(np.arange(1, 10) * 0.1, 12):
                a = fisher_koutcome_fock(n, K, eta).value
                b = fisher_koutcome(Fock(n), eta, K).value
                count += 1
                if b:
                    worst = max(worst, abs(a - b) / b)
                elif a:
                    worst = math.inf
    c.part(f"{count} cases, max relative gap {worst:.1e} <= 1e-10", worst <= 1e-10)
    f = fisher_koutcome_fock(3, 3, 0.5).value
    claimed = koutcome_claimed_closed_form(3, 0.5)
    c.part(f"documented discrepancy: general sum {f:g} vs claimed form {claimed:g}", f == 10.5 and claimed == 8.0)
    assert c.finish(), c.failed_parts()


def test_criterion_09_optimality_bound():
    c = Check(9, 1.0)
    rng = random.Random(20240601)
    grid = standard_eta_grid()
    violations, worst = 0, -math.inf
    for _ in range(100):
        support = rng.sample(range(11), rng.randint(1, 11))
        raw = [rng.random() for _ in support]
        total = math.fsum(raw)
        weights = dict(zip(support, [w / total for w in raw]))
        # absorb rounding into the largest weight so the sum is exactly representable near 1
        top = max(weights, key=weights.get)
        weights[top] += 1.0 - math.fsum(weights.values())
        mix = FockMixture(weights)
        for eta in grid:
            gap = fisher_onoff_mixture(mix, eta).value - mix.mean_photon_number * fisher_onoff_fock(1, eta).value
            worst = max(worst, gap)
            violations += gap > 1e-12
    c.part(f"100 mixtures x {len(grid)} etas, violations {violations}, max excess {worst:.2e}", violations == 0)
    assert c.finish(), c.failed_parts()


def test_criterion_10_crb_saturation():
    c = Check(10, 60.0)
    floor = 1 - 3 / math.sqrt(500)
    for probe, eta in ((Fock(1), 0.9), (Coherent(1.0), 0.5)):
        res = validate_crb(EstimationRun(probe, OnOff(0.0), eta, 10**5, seed=42, replicates=500))
        c.part(
            f"{probe.label()} eta={eta}: var/CRB {res.ratio:.4f} in [0.9, 1.1], >= {floor:.4f}",
            0.9 <= res.ratio <= 1.1 and res.ratio >= floor,
        )
    assert c.finish(), c.failed_parts()


def test_criterion_11_oracle_agreement():
    c = Check(11, 10.0)
    grid = standard_eta_grid()
    closed = [
        ("fock", lambda e: fisher_onoff_fock(3, e, 0.05).value, oracles.onoff_pmf_fock(3, 0.05)),
        ("coherent", lambda e: fisher_onoff_coherent(2.0, e, 0.05).value, oracles.onoff_pmf_coherent(2.0, 0.05)),
        (
            "heralded",
            lambda e: fisher_onoff_heralded(0.6, e, 0.05).value,
            oracles.onoff_pmf_mixture({0: 0.4, 1: 0.6}, 0.05),
        ),
        (
            "mixture",
            lambda e: fisher_onoff_mixture(FockMixture({1: 0.5, 3: 0.5}), e).value,
            oracles.onoff_pmf_mixture({1: 0.5, 3: 0.5}),
        ),
        ("koutcome-fock", lambda e: fisher_koutcome_fock(6, 4, e).value, oracles.koutcome_pmf_fock(6, 4)),
        (
            "koutcome-coherent",
            lambda e: fisher_koutcome(Coherent(2.0), e, 4).value,
            oracles.koutcome_pmf_coherent(2.0, 4),
        ),
    ]
    for name, f, pmf in closed:
        worst = max(abs(f(e) - oracles.fd_fisher(pmf, e)) / f(e) for e in grid)
        c.part(f"{name} {worst:.1e}", worst <= 1e-6)

    # homodyne coherent: central difference of the density in eta, fixed-grid integral
    def fd_homodyne(alpha, eta, h=1e-6):
        mu = math.sqrt(2 * eta) * alpha

        def f(q):
            p = pdf_coherent_lossy(alpha, eta, q)
            dp = (pdf_coherent_lossy(alpha, eta + h, q) - pdf_coherent_lossy(alpha, eta - h, q)) / (2 * h)
            return dp * dp / p

        return oracles.fixed_grid_integral(f, mu - 12, mu + 12)

    hom = max(abs(fisher_homodyne_coherent(1.0, e).value - fd_homodyne(1.0, e)) * e for e in grid)
    c.part(f"homodyne-coherent {hom:.1e}", hom <= 1e-6)
    # the small-eta expansion is an approximation, checked against its defining expression
    small = max(
        abs(fisher_onoff_small_eta(Fock(2), e, 0.05).value - 2 / (e + math.expm1(0.05) / 2))
        / fisher_onoff_small_eta(Fock(2), e, 0.05).value
        for e in grid
    )
    c.part(f"small-eta {small:.1e}", small <= 1e-6)
    norm = 0.0
    for n in range(0, 11):
        half = math.sqrt(2 * n + 1) + 10
        for eta in (0.0, 0.25, 0.5, 0.75, 1.0):
            norm = max(norm, abs(oracles.fixed_grid_integral(lambda q: pdf_fock_lossy(n, eta, q), -half, half) - 1))
            d = oracles.fixed_grid_integral(lambda q: pdf_fock_lossy_derivative(n, eta, q), -half, half)
            norm = max(norm, abs(d))
    for alpha in (0.5, 1.0, 2.0):
        for eta in (0.1, 0.5, 0.9):
            mu = math.sqrt(2 * eta) * alpha
            norm = max(
                norm,
                abs(oracles.fixed_grid_integral(lambda q: pdf_coherent_lossy(alpha, eta, q), mu - 12, mu + 12) - 1),
            )
    c.part(f"pdf normalization {norm:.1e} <= 1e-10", norm <= 1e-10)
    assert c.finish(), c.failed_parts()
