import math

import pytest

import csdual


def test_model_roundtrip():
    m = csdual.Model([(2, 1.0), (4, 0.5)], h=0.3)
    assert m.terms == [(2, 1.0), (4, 0.5)]
    assert m.h == 0.3
    assert m.xi(1.0) == pytest.approx(1.5)
    back = csdual.Model.from_dict(m.to_dict())
    assert back.terms == m.terms


def test_bad_model_raises():
    with pytest.raises(csdual.ModelError):
        csdual.Model([(2, -1.0)])
    with pytest.raises(csdual.InputError):
        csdual.Model.from_dict({"terms": [[2, 1]], "beta": 1})


def test_sign_pattern_of_pure_two_spin():
    assert csdual.sign_pattern(csdual.Model([(2, 1.0)]))["kind"] == "IdenticallyZero"


def test_weak_two_spin_is_replica_symmetric_at_zero():
    m = csdual.Model([(2, 0.25)])
    mu = csdual.Measure.dirac(0.0)
    cert = csdual.certify(m, mu)
    assert cert["duality_gap"] <= 1e-8
    assert csdual.primal_value(m, mu) == pytest.approx(csdual.dual_value(m, mu), abs=1e-10)


def test_weak_duality_on_a_two_atom_measure():
    m = csdual.Model([(3, 2.0)])
    mu = csdual.Measure([(0.0, 0.4), (0.6, 0.6)])
    assert mu.total_mass() == pytest.approx(1.0)
    assert csdual.dual_value(m, mu) <= csdual.primal_value(m, mu) + 1e-10


def test_solve_certifies_and_matches_certify():
    m = csdual.Model([(3, 2.0)], h=0.5)
    report = csdual.solve(m)
    assert report["status"] == "certified"
    mu = csdual.Measure.from_dict(report, m)
    assert csdual.certify(m, mu)["duality_gap"] == pytest.approx(report["certificate"]["duality_gap"], abs=1e-10)
    assert math.isfinite(report["free_energy"])


def test_solve_with_no_budget_is_uncertified():
    assert csdual.solve(csdual.Model([(3, 2.0)]), max_iterations=0)["status"] == "uncertified"


def test_oracle_brackets_the_solver():
    m = csdual.Model([(2, 1.0), (4, 1.0)]).scaled(2.0)
    report = csdual.solve(m)
    oracle = csdual.grid_oracle(m, N=500)
    assert oracle["D_lower"] <= report["free_energy"] + 1e-8
    assert report["free_energy"] <= oracle["P_upper"] + 1e-8
