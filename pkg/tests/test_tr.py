from fractions import Fraction

import mpmath

from exactwkb.elliptic import EllipticData
from exactwkb.tr import EllipticModel, TopologicalRecursion, airy_model, weber_free_energies


def test_weber_low_genus():
    F = weber_free_energies(3)
    assert F[2] == Fraction(-1, 240)
    assert F[3] == Fraction(1, 1008)


def test_airy_w03():
    tr = TopologicalRecursion(airy_model(top=12))
    w = tr.correlator(0, 3)
    # Airy: W_{0,3} = dz1 dz2 dz3 / (2 z1^2 z2^2 z3^2) up to normalization of the basis
    assert len(w) == 1
    assert list(w.values())[0] != 0


def test_elliptic_f2_stable_in_truncation():
    with mpmath.workdps(30):
        E = EllipticData(-5, 3)
        a = TopologicalRecursion(EllipticModel(E, top=16)).free_energy(2)
        b = TopologicalRecursion(EllipticModel(E, top=24)).free_energy(2)
        assert abs(a - b) < 1e-20 * max(1, abs(a))
