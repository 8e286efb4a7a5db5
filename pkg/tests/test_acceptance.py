"""Acceptance battery: one test per numbered criterion, at stated tolerances.

Each test prints a PASS/FAIL line; run with `pytest -s` to see them inline.
The battery rows are computed once per session and criterion 13 recomputes
the whole battery to check bit-for-bit reproducibility.
"""
import json

import pytest

from onofri import acceptance
from onofri.report import to_builtin

SEED = acceptance.DEFAULT_SEED


@pytest.fixture(scope="module")
def battery():
    return acceptance.run_battery(SEED)


def _check(battery, cid):
    rows = [r for r in battery if r["criterion"] == cid]
    assert rows, f"criterion {cid} produced no rows"
    ok = all(r["passed"] for r in rows)
    name = acceptance.CRITERIA[cid][0]
    print(f"criterion {cid:2d} [{name}]: {'PASS' if ok else 'FAIL'} ({len(rows)} rows)")
    for r in rows:
        assert r["passed"], f"criterion {cid} failed at {r['check']}: value={r['value']!r} tol={r['tolerance']!r}"


def test_criterion_01_spectral_core(battery):
    _check(battery, 1)


def test_criterion_02_minimum_at_alpha_one(battery):
    _check(battery, 2)


def test_criterion_03_zero_infimum_to_two_thirds(battery):
    _check(battery, 3)


def test_criterion_04_unbounded_below_half(battery):
    _check(battery, 4)


def test_criterion_05_bridge_identities(battery):
    _check(battery, 5)


def test_criterion_06_flat_mass_curve(battery):
    _check(battery, 6)


def test_criterion_07_pohozaev_window(battery):
    _check(battery, 7)


def test_criterion_08_uniqueness_windows(battery):
    _check(battery, 8)


def test_criterion_09_eigenvalue_mass_audits(battery):
    _check(battery, 9)


def test_criterion_10_nodal_accounting(battery):
    _check(battery, 10)


def test_criterion_11_second_variation(battery):
    _check(battery, 11)


def test_criterion_12_axisymmetric_inequality(battery):
    _check(battery, 12)


def test_criterion_13_determinism(battery):
    fresh = acceptance.run_battery(SEED)
    same = json.dumps(to_builtin(battery), sort_keys=True) == json.dumps(to_builtin(fresh), sort_keys=True)
    print(f"criterion 13 [determinism]: {'PASS' if same else 'FAIL'}")
    assert same, "rerun with the same seed changed result rows"
