import importlib
from dataclasses import replace

import pytest

from taillab.frequency import SpectralStatus, check_spectral_assumptions, wronskian_value

wronskian_module = importlib.import_module("taillab.frequency.wronskian")


def test_free_space_is_a_resonance(free_potential):
    verdict = check_spectral_assumptions(free_potential)
    assert verdict.status is SpectralStatus.RESONANCE
    assert abs(verdict.w_zero) < 1e-12
    assert all(w == pytest.approx(2 * e, abs=1e-12) for e, w in verdict.scan)


@pytest.mark.slow
def test_repulsive_potential_is_admissible(repulsive_m3):
    verdict = check_spectral_assumptions(repulsive_m3)
    assert verdict.ok
    assert verdict.eps0 is None
    assert abs(verdict.w_zero) > 1e-3
    assert all(w.real > 0 for _, w in verdict.scan)


@pytest.mark.slow
def test_deep_well_has_bound_state(deep_well):
    verdict = check_spectral_assumptions(deep_well)
    assert verdict.status is SpectralStatus.BOUND_STATE
    assert 0.0 < verdict.eps0 < 10**0.5
    assert abs(wronskian_value(deep_well, verdict.eps0)) < 1e-3
    assert "束缚态" in verdict.describe()


@pytest.mark.parametrize("root", [0.005, 2e-5])
def test_root_below_scan_floor_is_bound_state(monkeypatch, repulsive_m3, root):
    monkeypatch.setattr(wronskian_module, "wronskian_value", lambda spec, eps, **_: complex(float(eps) - root))
    verdict = check_spectral_assumptions(repulsive_m3)
    assert all(w.real > 0 for _, w in verdict.scan)
    assert verdict.status is SpectralStatus.BOUND_STATE
    assert verdict.eps0 == pytest.approx(root, rel=1e-4)


@pytest.mark.slow
def test_shallow_well_is_not_admissible(repulsive_m3):
    shallow = replace(repulsive_m3, well_depth=-0.49322, well_halfwidth=1.0)
    verdict = check_spectral_assumptions(shallow)
    assert verdict.status is SpectralStatus.BOUND_STATE
    assert 0.0 < verdict.eps0 < wronskian_module.SCAN_FLOOR
    assert abs(wronskian_value(shallow, verdict.eps0)) < 1e-4
