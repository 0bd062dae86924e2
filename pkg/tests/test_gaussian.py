import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import fock
from gravqfi.gaussian import (
    TABLE_I_PROBES,
    Coherent,
    CovMat2,
    Displacement2,
    GaussianState,
    NonPhysicalStateError,
    SqueezedThermal,
    SqueezedVacuum,
    Thermal,
    energy,
    is_bona_fide,
    make_probe,
    purity,
    symplectic_eigenvalue,
)

VACUUM = CovMat2(0.5, 0.0, 0.5)


def test_coherent_probe():
    s = make_probe(Coherent(2, 0))
    assert s.mean.x == pytest.approx(2.8284271247461903, abs=1e-15)
    assert s.mean.p == 0
    assert s.cov == VACUUM


def test_thermal_zero_is_vacuum():
    s = make_probe(Thermal(0))
    assert s.cov == VACUUM
    assert s.mean == Displacement2(0, 0)


def test_squeezed_vacuum_covariance():
    # e^{-2r}/2 and e^{+2r}/2 at r = 1.4436, by scalar arithmetic
    c = make_probe(SqueezedVacuum(1.4436, 0)).cov
    assert c.xx == pytest.approx(0.027866022034512956, rel=1e-13)
    assert c.pp == pytest.approx(8.971499401327073, rel=1e-13)
    assert c.xp == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize(
    "spec, rho",
    [
        (Thermal(1.3), lambda: fock.thermal(1.3)),
        (SqueezedVacuum(0.6, 0.0), lambda: fock.conjugate(fock.squeeze(0.6), fock.thermal(0))),
        (
            SqueezedThermal(0.7, 0.4, 0.0),
            lambda: fock.conjugate(fock.squeeze(0.4), fock.thermal(0.7)),
        ),
        (Coherent(1.1, -0.4), lambda: fock.conjugate(fock.displace(1.1 - 0.4j), fock.thermal(0))),
    ],
)
def test_probe_moments_match_fock_space(spec, rho):
    mean, cov = fock.moments(rho())
    s = make_probe(spec)
    np.testing.assert_allclose(s.mean.as_array(), mean, atol=1e-9)
    np.testing.assert_allclose(s.cov.as_array(), cov, atol=1e-9)


@pytest.mark.parametrize("bad", [Thermal, lambda v: SqueezedThermal(v, 0.5, 0)])
def test_negative_occupation_rejected(bad):
    with pytest.raises(ValueError):
        bad(-0.1)


@pytest.mark.parametrize(
    "make", [lambda: Coherent(math.nan, 0), lambda: SqueezedVacuum(math.inf, 0), lambda: Thermal(math.nan)]
)
def test_non_finite_rejected(make):
    with pytest.raises(ValueError):
        make()


@pytest.mark.parametrize("name", sorted(TABLE_I_PROBES))
def test_table_i_energy(name):
    assert abs(energy(make_probe(TABLE_I_PROBES[name])) - 4) < 1e-3


def test_energy_simple_cases():
    assert energy(GaussianState.vacuum()) == 0
    assert energy(make_probe(Thermal(4))) == 4


@pytest.mark.parametrize(
    "spec, expected",
    [
        (Coherent(2, 0), 1.0),
        (SqueezedVacuum(1.4436, 0), 1.0),
        (Thermal(4), 1 / 9),
        (SqueezedThermal(1, 0.8814, 0), 1 / 3),
    ],
)
def test_probe_purity(spec, expected):
    assert purity(make_probe(spec).cov) == pytest.approx(expected, abs=1e-12)


def test_purity_rejects_unphysical():
    with pytest.raises(NonPhysicalStateError):
        purity(CovMat2(0.4, 0, 0.4))


def test_bona_fide_examples():
    assert is_bona_fide(VACUUM, 1e-10)
    assert not is_bona_fide(CovMat2(0.4, 0, 0.4), 1e-10)
    assert not is_bona_fide(CovMat2(-1, 0, -1), 1e-10)
    with pytest.raises(NonPhysicalStateError):
        GaussianState(Displacement2(), CovMat2(0.4, 0, 0.4))


def test_symplectic_eigenvalue_examples():
    assert symplectic_eigenvalue(VACUUM) == 0.5
    assert symplectic_eigenvalue(make_probe(Thermal(4)).cov) == 4.5


@given(st.floats(0, 3), st.floats(0, 2 * math.pi, exclude_max=True))
def test_squeezed_vacuum_is_pure_for_any_orientation(r, phi):
    c = make_probe(SqueezedVacuum(r, phi)).cov
    assert symplectic_eigenvalue(c) == pytest.approx(0.5, rel=1e-9)
    assert is_bona_fide(c)
    assert purity(c) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(0, 5), st.floats(0, 1.5), st.floats(0, 2 * math.pi))
def test_squeezed_thermal_invariants(n, r, phi):
    c = make_probe(SqueezedThermal(n, r, phi)).cov
    assert is_bona_fide(c)
    assert purity(c) == pytest.approx(1 / (2 * n + 1), rel=1e-9)
    assert energy(make_probe(SqueezedThermal(n, r, phi))) == pytest.approx(
        ((2 * n + 1) * math.cosh(2 * r) - 1) / 2, rel=1e-9
    )


def test_inverse_closed_form():
    c = CovMat2(2.0, 0.3, 0.7)
    np.testing.assert_allclose(c.inverse() @ c.as_array(), np.eye(2), atol=1e-14)
