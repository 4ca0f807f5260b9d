import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from optostore.errors import DomainError
from optostore.model import (DEFAULT_G_TIMES_XZPF, HBAR, CouplingSpec, DriveConfig,
                             ResonatorParams, effective_coupling, validate,
                             zero_point_fluctuation)


def test_per_photon_coupling_reproduces_operating_point():
    assert DEFAULT_G_TIMES_XZPF == pytest.approx(1632.99, rel=1e-5)
    assert effective_coupling(DEFAULT_G_TIMES_XZPF, 1.5e6) == pytest.approx(2e6, rel=1e-12)
    assert CouplingSpec(g_times_xzpf=DEFAULT_G_TIMES_XZPF, n_c=1.5e6).G0 == pytest.approx(2e6)


def test_zero_photons_zero_coupling():
    assert effective_coupling(1234.5, 0.0) == 0.0


def test_negative_photon_number_rejected():
    with pytest.raises(DomainError):
        effective_coupling(1.0, -1.0)


@given(st.floats(1e-3, 1e6), st.floats(0, 1e12))
def test_quadrupling_photons_doubles_coupling(g, n):
    assert effective_coupling(g, 4 * n) == pytest.approx(2 * effective_coupling(g, n), rel=1e-12)


def test_xzpf_scaling():
    m, f = 1e-11, 108.4e6
    x = zero_point_fluctuation(m, f)
    assert x / zero_point_fluctuation(4 * m, f) == pytest.approx(2.0, rel=1e-14)
    assert x / zero_point_fluctuation(m, 4 * f) == pytest.approx(2.0, rel=1e-14)


def test_xzpf_against_arbitrary_precision():
    mpmath.mp.dps = 40
    ref = mpmath.sqrt(mpmath.mpf(HBAR) / (2 * mpmath.mpf("1e-11") * 2 * mpmath.pi * mpmath.mpf("108.4e6")))
    assert zero_point_fluctuation(1e-11, 108.4e6) == pytest.approx(float(ref), rel=1e-14)


@pytest.mark.parametrize("mass,f", [(0, 1e6), (1e-11, 0), (-1, 1e6)])
def test_xzpf_domain(mass, f):
    with pytest.raises(DomainError):
        zero_point_fluctuation(mass, f)


def test_validate_operating_point():
    rep = validate(ResonatorParams(f_m=108.4e6, gamma_m=38e3, kappa=40e6))
    assert rep.valid and rep.resolved_sideband and not rep.warnings


def test_validate_overcoupled():
    rep = validate(ResonatorParams(kappa=40e6, kappa_ex=60e6))
    assert not rep.valid
    assert "kappa_ex exceeds kappa" in rep.violations


def test_validate_unresolved_sideband_is_only_a_flag():
    rep = validate(ResonatorParams(f_m=20e6, kappa=40e6))
    assert rep.valid and not rep.resolved_sideband and rep.warnings


def test_validate_lists_every_violation():
    rep = validate(ResonatorParams(f_m=-1.0, gamma_m=-1.0, kappa=40e6, kappa_ex=50e6))
    assert len(rep.violations) == 3


def test_lossless_needs_opt_in():
    p = ResonatorParams(gamma_m=0.0, kappa=0.0)
    assert not validate(p).valid
    assert validate(p, allow_lossless=True).valid


def test_default_external_coupling_is_half():
    assert ResonatorParams(kappa=40e6).kappa_ex == 20e6


def test_drive_detuning_consistency():
    p = ResonatorParams()
    d = DriveConfig.at_detuning(p, 0.3e6)
    assert d.delta_sl == pytest.approx(p.f_m + 0.3e6)
    assert validate(p, d).valid
    assert not validate(p, DriveConfig(delta_sl=p.f_m, detuning=1e6)).valid
    assert math.isclose(DriveConfig.at_detuning(p).detuning, 0.0)
