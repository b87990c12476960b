import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srb.noise import (ChannelKind, ChannelType, NoiseModel, analytic_decay, classify_channel,
                       compose, custom_channel, identity_channel, make_channel, tuned_channel)
from srb.qops import SuperOp, leakage_decay, random_channel, subspace_decay, unitary_to_super
from srb.synth import PhaseGate

KINDS = [k for k in ChannelKind if k is not ChannelKind.CUSTOM]
TABLE_KINDS = [ChannelKind.INTENSITY, ChannelKind.OPTICAL_PUMPING, ChannelKind.INHOMOGENEOUS_FIELD]


@pytest.mark.parametrize("kind", KINDS)
@given(eps=st.floats(0, 1))
@settings(max_examples=15, deadline=None)
def test_channels_are_cptp(kind, eps):
    ch = make_channel(kind, eps)
    assert ch.superop.is_cptp()
    assert ch.kind is kind


@pytest.mark.parametrize("kind", KINDS)
def test_zero_epsilon_is_identity(kind):
    assert np.allclose(make_channel(kind, 0.0).superop.matrix, np.eye(16))


def test_invalid_epsilon():
    with pytest.raises(ValueError):
        make_channel("depolarizing", -0.1)
    with pytest.raises(ValueError):
        make_channel("optical_pumping", 1.5)
    make_channel("intensity", 1.5)  # a rotation angle, not a probability
    with pytest.raises(ValueError):
        make_channel("custom", 0.1)


def test_depolarizing_action(rng):
    ch = make_channel("depolarizing", 0.2).superop
    rho = np.diag([1.0, 0, 0, 0])
    assert np.allclose(ch.apply(rho), 0.8 * rho + 0.2 * np.eye(4) / 4)


def test_subspace_depolarizing_keeps_singlet():
    ch = make_channel("subspace_depolarizing", 0.3)
    c = classify_channel(ch)
    assert c.channel_type is ChannelType.TYPE1
    assert subspace_decay(ch.superop) == pytest.approx(0.7)
    assert leakage_decay(ch.superop) == pytest.approx(1.0)


@pytest.mark.parametrize("kind,expected", [
    (ChannelKind.INTENSITY, ChannelType.TYPE1),
    (ChannelKind.OPTICAL_PUMPING, ChannelType.TYPE2),
    (ChannelKind.INHOMOGENEOUS_FIELD, ChannelType.TYPE2),
    (ChannelKind.SUBSPACE_DEPOLARIZING, ChannelType.TYPE1),
    (ChannelKind.DEPOLARIZING, ChannelType.TYPE2),
])
def test_classification(kind, expected):
    assert classify_channel(make_channel(kind, 0.05)).channel_type is expected


def test_identity_is_type1():
    c = classify_channel(identity_channel())
    assert c.channel_type is ChannelType.TYPE1
    assert c.L == 0 and c.S == 0


def test_compose_order():
    a = custom_channel(unitary_to_super(np.diag([1, 1j, 1, 1])))
    b = make_channel("optical_pumping", 0.3)
    ab = compose(a, b)
    assert np.allclose(ab.superop.matrix, b.superop.matrix @ a.superop.matrix)


def test_custom_channel_validation(rng):
    custom_channel(random_channel(4, rng))
    with pytest.raises(ValueError):
        custom_channel(SuperOp(2 * np.eye(16)))


def test_analytic_table_values():
    assert analytic_decay("intensity", 0.1) == pytest.approx((0.99, 1.0, 0.002))
    assert analytic_decay("optical_pumping", 0.12)[:2] == pytest.approx((1 - 0.13, 1 - 0.16))
    assert analytic_decay("inhomogeneous_field", 0.06)[:2] == pytest.approx((1 - 0.13, 1 - 0.16))
    with pytest.raises(ValueError):
        analytic_decay("depolarizing", 0.1)


def _average_error(tables, channel):
    """Clifford-averaged error ``mean(noisy C ideal C^dag)`` with noise after every phase gate."""
    ch = channel.superop.matrix
    acc = np.zeros((16, 16), dtype=complex)
    for r in tables.recipes:
        m = np.eye(16)
        for g in r.gates:
            m = unitary_to_super(g.unitary()).matrix @ m
            if isinstance(g, PhaseGate):
                m = ch @ m
        acc += m @ unitary_to_super(r.unitary()).matrix.conj().T
    return SuperOp(acc / len(tables.recipes))


@pytest.mark.parametrize("kind", TABLE_KINDS)
@pytest.mark.parametrize("eps", [0.01, 0.03, 0.05])
def test_per_qubit_models_match_table(tables, kind, eps):
    avg = _average_error(tables, make_channel(kind, eps))
    r_zz, t_zz, _ = analytic_decay(kind, eps)
    assert subspace_decay(avg) ** (1 / 3) == pytest.approx(r_zz, abs=5 * eps**2)
    assert leakage_decay(avg) ** (1 / 3) == pytest.approx(t_zz, abs=5 * eps**2)


@pytest.mark.parametrize("r,t", [(0.9934, 0.985), (0.95, 0.9), (0.98, 0.99), (0.99, 1.0)])
def test_tuned_channel_hits_targets(r, t):
    ch = tuned_channel(r, t)
    assert ch.superop.is_cptp()
    assert subspace_decay(ch.superop) == pytest.approx(r, abs=1e-12)
    assert leakage_decay(ch.superop) == pytest.approx(t, abs=1e-12)


def test_tuned_channel_rejects_unreachable():
    with pytest.raises(ValueError):
        tuned_channel(0.99, 0.0)
    with pytest.raises(ValueError):
        tuned_channel(1.0, 0.99)  # the exchange also lowers r
    with pytest.raises(ValueError):
        tuned_channel(1.2, 0.9)


def test_noise_model_defaults_to_identity():
    nm = NoiseModel()
    for ch in (nm.per_phase_gate, nm.per_rotation, nm.per_clifford, nm.prep, nm.measure):
        assert np.allclose(ch.superop.matrix, np.eye(16))
