import numpy as np
import pytest

from helpers import make_overlapping, make_separable
from saddlesvm.data_model import Dataset
from saddlesvm.geometry_oracle import fw_oracle, gilbert_solve
from saddlesvm.preprocess import apply_transform


def _transformed(data):
    return apply_transform(data, seed=0)


def test_gilbert_singletons_one_step():
    data = Dataset(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([1, -1]))
    res = gilbert_solve(_transformed(data), epsilon=1e-6)
    assert res.distance == pytest.approx(2.0, rel=1e-12)
    assert res.iterations == 1
    assert res.status == "converged"


def test_gilbert_matches_fw_oracle():
    for seed in range(8):
        tdata = _transformed(make_separable(seed))
        eps = 1e-3
        gil = gilbert_solve(tdata, eps)
        orc = fw_oracle(tdata, None, 1e-10)
        assert gil.status == "converged"
        assert gil.distance <= (1.0 + eps) * orc.distance + 1e-12
        assert gil.distance >= orc.distance - 1e-12


def test_gilbert_nonseparable_diagnostic():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    data = Dataset(X, np.array([1, 1, -1, -1]))
    res = gilbert_solve(_transformed(data), epsilon=1e-6)
    assert res.status == "nonseparable"
    assert res.distance < 1e-8


def test_fw_oracle_certificate_and_feasibility():
    for seed in range(5):
        tdata = _transformed(make_separable(seed))
        res = fw_oracle(tdata, None, 1e-10)
        assert res.gap_certificate <= 1e-10
        assert abs(res.eta.sum() - 1.0) < 1e-9 and res.eta.min() >= -1e-12
        assert abs(res.xi.sum() - 1.0) < 1e-9 and res.xi.min() >= -1e-12
        assert res.half_sq == pytest.approx(0.5 * res.distance ** 2)


def test_fw_oracle_capped_feasibility_and_monotonicity():
    data = make_overlapping(1)
    tdata = _transformed(data)
    nu = 1.0 / (0.85 * min(data.n1, data.n2))
    res = fw_oracle(tdata, nu, 1e-10)
    assert res.eta.max() <= nu + 1e-9 and res.xi.max() <= nu + 1e-9
    # Shrinking the hulls (stronger cap) cannot decrease the distance.
    free = fw_oracle(tdata, None, 1e-10)
    assert res.distance >= free.distance - 1e-9


def test_fw_oracle_kkt_conditions():
    # First-order optimality of the hull-distance QP: the weighted hull
    # points attain the extreme inner products with z = A eta - B xi.
    for seed in range(5):
        tdata = _transformed(make_separable(seed))
        res = fw_oracle(tdata, None, 1e-10)
        z = tdata.Xp @ res.eta - tdata.Xm @ res.xi
        sp = tdata.Xp.T @ z
        sm = tdata.Xm.T @ z
        assert float(np.dot(z, tdata.Xp @ res.eta)) <= sp.min() + 1e-8
        assert float(np.dot(z, tdata.Xm @ res.xi)) >= sm.max() - 1e-8
