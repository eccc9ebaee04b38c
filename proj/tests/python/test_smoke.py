import math
import os
from fractions import Fraction

import numpy as np
import pytest

import qmlab


def test_exponent_values():
    assert qmlab.exponent("contact", 3, "inf", 1)["exact"] == "1/2"
    r = qmlab.exponent("contact", 2, "8", 3)
    assert Fraction(r["exact"]) == Fraction(7, 32)
    assert r["value"] == pytest.approx(7 / 32)
    # contact and Sogge agree below the kink p0 = 6 for n = 2
    assert qmlab.exponent("contact", 2, "4", 5)["exact"] == qmlab.exponent("sogge", 2, "4")["exact"]
    with pytest.raises(ValueError):
        qmlab.exponent("contact", 2, "1", 1)


def test_contact_profile():
    prof = qmlab.contact_profile("x1", "x1 - x2^4")
    assert prof["uniform"] and prof["order"] == 3
    mixed = qmlab.contact_profile("x1", "x1 - x2^2 - x3^6")
    assert not mixed["uniform"]
    assert {d["order"] for d in mixed["directions"]} == {1, 5}


def test_egorov_symbol():
    assert qmlab.egorov_symbol("x2^2", "x2^2 - x2^4", 2) == "x2^4"


def test_cutoff_peak_and_synthesis():
    h = 2.0**-6
    c = qmlab.build_cutoff("ex21", 2, 3, h)
    assert c.dim == 2 and c.cell_count > 0
    assert c.l2_norm ** 2 == pytest.approx(c.volume, rel=1e-12)
    peak = (2 * math.pi * h) ** -1 * math.sqrt(c.volume)
    assert c.peak_value == pytest.approx(peak, rel=1e-12)
    t = qmlab.synthesize(c, np.array([[0.0, 0.0], [0.5, 0.1]]))
    assert t.shape == (2,)
    assert abs(t[0] - peak) / peak < 1e-10
    assert abs(t[1]) < abs(t[0])
    with pytest.raises(ValueError):
        qmlab.synthesize(c, np.zeros((3, 3)))


def test_joint_quasimode():
    c = qmlab.build_cutoff("ex22", 2, 3, 2.0**-8)
    for m1 in range(3):
        for m2 in range(3):
            ratio, _ = qmlab.verify_joint_quasimode(c, m1, m2)
            assert ratio <= 1 + 1e-12


def test_list_and_run():
    ids = [row[0] for row in qmlab.list_experiments()]
    assert {"delta", "ex21", "vdc"} <= set(ids)
    rep = qmlab.run_config("[experiment]\nid = delta-curves\nseed = 5\n[delta]\nn = 2\nsamples = 5\n")
    assert rep["all_pass"] and rep["seed"] == 5
    assert rep["tables"]["delta"].startswith("family,n,p,k,delta")
    assert all({"measured", "predicted", "tolerance"} <= set(v) for v in rep["verdicts"])


def test_run_file_and_errors():
    src = os.environ.get("QMLAB_SOURCE_DIR", os.path.join(os.path.dirname(__file__), "..", ".."))
    rep = qmlab.run_file(os.path.join(src, "configs", "contact_s1s2.cfg"))
    assert rep["all_pass"]
    with pytest.raises(qmlab.ConfigError):
        qmlab.run_config("[experiment]\nid = sharpness-sweep\n[lp]\np = 1\n")
    # a target box too small for the L^p tails is refused by the analysis module
    tiny = (
        "[experiment]\nid = sharpness-sweep\n[example]\nname = ex21\nn = 2\nk = 3\n"
        "[sweep]\nh_start = 2^-4\nh_stop = 2^-8\n[lp]\np = 8\nmode = lp\nmargin = 0.5\n"
    )
    with pytest.raises(qmlab.ResolutionError, match="analysis"):
        qmlab.run_config(tiny)
