import math

import numpy as np
import pytest

from _instances import make_channel, random_instance, unit_params
from relaymon.benchmarks import eval_ee, eval_ej
from relaymon.rates import JamPower, Listen

JAMMER = make_channel(h1=10.0, h2=0.0, h3=1.0, H4=0.0, h5=2.0, h6=1.0)


def test_ee_scalar_instance():
    out = eval_ee(make_channel(), unit_params())
    assert out.gammas.gamma_e == pytest.approx(2.0)
    assert out.rate == pytest.approx(0.5)
    assert isinstance(out.phase1, Listen) and isinstance(out.phase2, Listen)


def test_ee_fails_when_monitor_is_weak():
    out = eval_ee(make_channel(h3=0.1, H4=0.1), unit_params())
    assert out.gammas.gamma_e < min(out.gammas.gamma_r, out.gammas.gamma_d)
    assert out.rate == 0.0


def test_ej_desk_instance():
    out = eval_ej(JAMMER, unit_params(p_max_w=10.0))
    assert out.gammas.gamma_d == pytest.approx(4 / 11)
    assert out.rate == pytest.approx(0.5 * math.log2(1 + 4 / 11))
    assert out.phase2 == JamPower(10.0)


def test_ej_zero_budget_is_ee_without_mrc(rng):
    ch, p = random_instance(rng)
    p0 = unit_params(**{**p.__dict__, "p_max_w": 0.0})
    ej, ee = eval_ej(ch, p0), eval_ee(ch, p0)
    assert ej.gammas.gamma_d == ee.gammas.gamma_d and ej.gammas.gamma_r == ee.gammas.gamma_r
    assert ej.gammas.gamma_e <= ee.gammas.gamma_e


def test_ej_null_h6_has_no_effect(rng):
    ch, p = random_instance(rng)
    ch = make_channel(ch.h1, ch.h2, ch.h3, ch.H4, ch.h5, np.zeros(4), ch.d)
    assert eval_ej(ch, p).gammas.gamma_d == eval_ee(ch, p).gammas.gamma_d
