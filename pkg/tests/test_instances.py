from __future__ import annotations

import pytest

from hopforders.finfield import finite_field, transpose
from hopforders.groups import CapExceededError
from hopforders.instances import (InstanceError, InstanceSpec, build_instance, build_psl_witness,
                                  build_sl_instance, check_thm2_hypotheses, sp_symmetric_matrices)
from hopforders.orders import verify_hopf_order


# ---- specs

def test_spec_round_trip():
    data = {"family": "sl", "q": 2, "n": 1, "cap": 1000, "conductor": "auto"}
    spec = InstanceSpec.from_dict(data)
    assert spec.to_dict() == data
    assert spec.label == "sl(2,1)"
    comp = InstanceSpec.from_dict({"family": "composite", "q": 2, "ns": [1, 1]})
    assert comp.ns == (1, 1) and comp.label == "composite(2;1,1)"
    assert InstanceSpec.from_dict({"family": "sl", "q": 2, "n": 1, "tau": "identity"}).to_dict()["tau"] == "identity"


@pytest.mark.parametrize("data", [
    {"family": "nope"},
    {"q": 2},
    {"family": "sl", "q": 2},
    {"family": "sl", "q": 2, "n": 1, "colour": 3},
    {"family": "sl", "q": 2, "n": 1, "cap": 0},
    {"family": "psl_witness"},
])
def test_spec_errors(data):
    with pytest.raises(InstanceError):
        InstanceSpec.from_dict(data)


def test_cap_is_enforced():
    with pytest.raises((InstanceError, CapExceededError)):
        build_sl_instance(3, 1, cap=100)
    with pytest.raises(InstanceError):
        build_instance({"family": "sp", "q": 5, "n": 2, "cap": 10 ** 6})


def test_psl_range():
    with pytest.raises(InstanceError):
        build_psl_witness(7)


# ---- linear families

@pytest.mark.parametrize("name, order", [("sl21", 24), ("sl31", 216), ("gl21", 24), ("sp31", 216)])
def test_orders_and_subgroups(name, order, request):
    inst = request.getfixturevalue(name)
    q = inst.spec.q
    assert inst.G.order == order
    assert inst.N.order == q * q and inst.L.order == q and inst.P.order == q
    assert inst.M.order == q * q
    assert inst.X.size == order
    assert all(inst.G.mul(l, p) == inst.G.mul(p, l) for l in inst.L.indices for p in inst.P.indices)


def test_gl_and_sl_agree_for_two():
    a, b = build_sl_instance(2, 1), build_instance({"family": "gl", "q": 2, "n": 1})
    assert a.G.order == b.G.order and a.X.size == b.X.size


@pytest.mark.parametrize("q, n", [(2, 1), (3, 1), (2, 2), (3, 2), (4, 1)])
def test_sp_matrices_are_symmetric(q, n):
    F = finite_field(q)
    mats, info = sp_symmetric_matrices(F, n)
    assert len(mats) == F.m * n
    for S in mats:
        assert S == transpose(S)
    assert len(set(mats)) == len(mats)


@pytest.mark.parametrize("name", ["sl21", "sl31", "sp31", "gl21"])
def test_hypotheses_hold(name, request):
    cert = check_thm2_hypotheses(request.getfixturevalue(name))
    assert cert.passed, cert.to_dict()


def test_identity_tau_breaks_hypotheses():
    inst = build_sl_instance(2, 1, tau="identity")
    cert = check_thm2_hypotheses(inst)
    assert not cert.checks["iii_direct_sum"]
    assert not cert.checks["v_dual_fixed_points"]
    assert cert.witnesses["v_dual_fixed_points"]["character"]
    assert cert.checks["i_isomorphic_commuting"] and cert.checks["ii_faithful"]


def test_explicit_tau_matrix():
    inst = build_sl_instance(3, 1, tau=[[1, 0], [1, 1]])
    assert check_thm2_hypotheses(inst).passed


# ---- other families

def test_s4_instance(s4):
    assert s4.G.order == 24 and s4.X.size == 24
    assert s4.tau is None and s4.M is s4.N
    assert verify_hopf_order(s4.X, s4.twist).passed
    with pytest.raises(InstanceError):
        check_thm2_hypotheses(s4)


def test_heisenberg_example(heis21):
    cert = heis21.extras["certificate"]
    assert cert.passed, cert.to_dict()
    assert cert.details["X_ne_X_mirror_witness"] is not None
    assert heis21.G.order == 2 ** 5 * 6
    # the mirror order is also a Hopf order for the same twist
    assert verify_hopf_order(heis21.extras["X_mirror"], heis21.twist).passed


@pytest.mark.parametrize("p", [2, 3, 5])
def test_psl_witness(p):
    cert = build_psl_witness(p)
    assert cert.passed, cert.to_dict()
    assert cert.details["order"] == p ** 3
    assert cert.details["non_integral_degrees"]


def test_composite(composite211):
    inst = composite211
    assert inst.G.order == 576
    assert inst.extras["product_twist"].passed
    assert inst.M.order == 16
    assert check_thm2_hypotheses(inst).checks["iii_direct_sum"]
