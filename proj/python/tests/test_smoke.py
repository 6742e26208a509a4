import json
import math

import pytest

import selberg


def test_phi3_unitary_and_known_value():
    re, im = selberg.phi3("0.5+1i", digits=30)
    assert re.startswith("5.23127151694381217728")
    assert abs(abs(selberg.to_complex((re, im))) - 1.0) < 1e-15
    expected = math.pi / 2 * 1.2020569031595942 / (math.pi**4 / 90)
    assert abs(selberg.to_complex(selberg.phi3(2)) - expected) < 1e-14


def test_psi_on_critical_line():
    for q in (3, 4, 7):
        assert abs(abs(selberg.to_complex(selberg.psi(q, 0.5 + 2.5j))) - 1.0) < 1e-15


def test_z_value_low_order():
    z = selberg.z_value(3, "0.5+5i", n0=50, digits=50, escalate=False)
    assert z["K"] == 12
    assert z["value"]["re"].startswith("1.19221339749997")
    assert z["value"]["im"].startswith("7.4413721696096")


def test_partition_tables():
    p = selberg.partition(4)
    assert p["violations"] == 0
    assert p["kappa"] == 1


def test_euler_product_matches_real_axis():
    e = selberg.euler_product(3, "2", 1e4)
    z = selberg.z_value(3, 2, n0=30, digits=40, eps=1e-6)
    assert abs(selberg.to_complex(e["value"]) - selberg.to_complex((z["value"]["re"], z["value"]["im"]))) < 1e-3


def test_run_modes_and_errors():
    status, text = selberg.run("partition", q=5)
    assert status == 0
    assert json.loads(text)["validation"]["violations"] == []
    with pytest.raises(ValueError):
        selberg.run("verify-phi", q=4, t_min=1, t_max=1)
    with pytest.raises(ValueError):
        selberg.run("value", q=2)
