import math

import numpy as np
import pytest

from decoy_akg import (
    STANDARD_FIBER,
    ChannelParams,
    RateInputs,
    akg_rate,
    alpha_of_distance,
    binary_entropy_bar,
    counting_rate,
    error_rate,
    find_zero_distance,
    optimal_mu_derivative_check,
    optimize_signal_intensity,
    single_photon_credit,
    universal_upper,
)


def test_entropy_endpoints_and_saturation():
    assert binary_entropy_bar(0.0) == 0.0
    assert binary_entropy_bar(0.5) == 1.0
    assert binary_entropy_bar(0.75) == 1.0
    assert binary_entropy_bar(1.0) == 1.0
    # continuity at the saturation point
    assert binary_entropy_bar(0.5 - 1e-9) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        binary_entropy_bar(-0.01)
    with pytest.raises(ValueError):
        binary_entropy_bar(1.01)
    arr = binary_entropy_bar(np.array([0.0, 0.25, 0.6]))
    assert arr.shape == (3,)
    assert arr[2] == 1.0


def test_single_photon_credit_conventions():
    assert single_photon_credit(0.0, 0.1) == 0.0
    assert single_photon_credit(-1e-9, 0.0) == 0.0
    assert single_photon_credit(1e-6, 5e-7) == 0.0  # ratio 1/2 saturates
    assert single_photon_credit(1e-6, 2e-6) == 0.0  # overshooting bound is clamped
    credit = single_photon_credit(1e-6, 3e-8)
    assert credit == pytest.approx(1e-6 * (1.0 - binary_entropy_bar(0.03)), rel=1e-12)


def _inputs(**overrides):
    base = dict(
        mu_signal=0.5,
        q1=4e-6,
        b1=1.5e-7,
        q0=4e-7,
        p_signal=2.4e-6,
        s_signal=0.1,
        pD=0.0,
    )
    base.update(overrides)
    return RateInputs(**base)


def test_rate_without_single_photon_credit_is_nonpositive():
    inputs = _inputs(q1=0.0, q0=0.0, pD=0.0)
    rate = akg_rate(inputs, "forward")
    expected = -0.5 * inputs.p_signal * binary_entropy_bar(inputs.s_signal)
    assert rate == pytest.approx(expected, rel=1e-12)
    assert rate <= 0.0


def test_direction_gap_identity():
    # reverse - forward = (pD - e^-mu (q0 + pD)) / 2, whatever the bounds say
    for pD in (0.0, 2e-7):
        inputs = _inputs(pD=pD)
        gap = akg_rate(inputs, "reverse") - akg_rate(inputs, "forward")
        expected = 0.5 * (pD - math.exp(-inputs.mu_signal) * (inputs.q0 + pD))
        assert gap == pytest.approx(expected, rel=1e-12, abs=1e-20)
    with pytest.raises(ValueError):
        akg_rate(_inputs(), "sideways")


def test_clean_channel_reduction():
    # with p0 = pD = 0 both directions reduce to
    # (mu e^-mu alpha (1 - h(s)) - (1 - e^(-alpha mu)) h(s)) / 2
    params = ChannelParams(theta=0.1, a0=5.0, a1=0.17, p0=0.0, pD=0.0, s=0.03)
    alpha, mu = 1e-3, 0.6
    inputs = RateInputs(
        mu_signal=mu,
        q1=alpha,
        b1=params.s * alpha,
        q0=0.0,
        p_signal=float(counting_rate(mu, alpha, params)),
        s_signal=float(error_rate(mu, alpha, params)),
        pD=0.0,
    )
    h = binary_entropy_bar(params.s)
    expected = 0.5 * (
        mu * math.exp(-mu) * alpha * (1.0 - h) - (1.0 - math.exp(-alpha * mu)) * h
    )
    for direction in ("forward", "reverse"):
        assert akg_rate(inputs, direction) == pytest.approx(expected, rel=1e-12)


def test_weak_channel_factorization():
    # for small alpha the clean-channel rate factorizes as
    # alpha * mu (e^-mu - (1 + e^-mu) h(s)) / 2
    params = ChannelParams(theta=0.1, a0=5.0, a1=0.17, p0=0.0, pD=0.0, s=0.03)
    alpha, mu = 1e-8, 0.5
    inputs = RateInputs(
        mu_signal=mu,
        q1=alpha,
        b1=params.s * alpha,
        q0=0.0,
        p_signal=float(counting_rate(mu, alpha, params)),
        s_signal=float(error_rate(mu, alpha, params)),
        pD=0.0,
    )
    h = binary_entropy_bar(params.s)
    approx = alpha * mu * (math.exp(-mu) - (1.0 + math.exp(-mu)) * h) / 2.0
    assert akg_rate(inputs, "forward") == pytest.approx(approx, rel=1e-6)


def test_universal_upper_is_definitional_substitution():
    params = ChannelParams(theta=0.1, a0=5.0, a1=0.17, p0=4e-7, pD=1e-7, s=0.03)
    alpha, mu = 2e-5, 0.45
    for direction in ("forward", "reverse"):
        via_inputs = akg_rate(
            RateInputs(
                mu_signal=mu,
                q1=alpha + params.p0 - params.pD,
                b1=params.s * alpha + 0.5 * (params.p0 - params.pD),
                q0=params.p0 - params.pD,
                p_signal=float(counting_rate(mu, alpha, params)),
                s_signal=float(error_rate(mu, alpha, params)),
                pD=params.pD,
            ),
            direction,
        )
        assert universal_upper(mu, alpha, params, direction) == pytest.approx(
            via_inputs, rel=1e-14
        )


def test_universal_upper_estimation_dark_rate_knob():
    params = ChannelParams(theta=0.1, a0=5.0, a1=0.17, p0=4e-7, pD=4e-7, s=0.03)
    alpha = 3.4e-6
    literal = universal_upper(0.4, alpha, params, "reverse")
    inclusive = universal_upper(0.4, alpha, params, "reverse", estimation_dark_rate=0.0)
    # attributing every click to the channel raises the estimated yield
    assert inclusive != pytest.approx(literal, rel=1e-6)


def test_optimizer_finds_analytic_maximum():
    mu, value = optimize_signal_intensity(lambda m: m * math.exp(-m), mu_lower=0.05)
    assert mu == pytest.approx(1.0, abs=1e-4)
    assert value == pytest.approx(math.exp(-1.0), rel=1e-8)


def test_optimizer_scale_invariance_and_vector_path():
    def rate(m):
        return -((m - 0.7) ** 2)

    mu1, _ = optimize_signal_intensity(rate, 0.1)
    mu2, _ = optimize_signal_intensity(lambda m: 5.0 * rate(m), 0.1)
    assert mu1 == pytest.approx(mu2, abs=1e-6)
    mu3, _ = optimize_signal_intensity(rate, 0.1, vector_fn=lambda ms: -((ms - 0.7) ** 2))
    assert mu3 == pytest.approx(mu1, abs=1e-6)


def test_optimizer_returns_best_even_when_negative():
    mu, value = optimize_signal_intensity(lambda m: -1.0 - (m - 0.4) ** 2, 0.1)
    assert value < 0.0
    assert mu == pytest.approx(0.4, abs=1e-4)
    with pytest.raises(ValueError):
        optimize_signal_intensity(lambda m: m, mu_lower=-0.1)


def test_zero_distance_bisection():
    assert find_zero_distance(lambda L: 100.0 - L, 0.0, 240.0) == pytest.approx(100.0, abs=0.01)
    assert find_zero_distance(lambda L: -1.0, 0.0, 50.0) == 0.0
    assert find_zero_distance(lambda L: 1.0, 0.0, 50.0) == 50.0


def test_derivative_check_report():
    params = STANDARD_FIBER
    alphas = [alpha_of_distance(L, params) for L in (0.0, 60.0, 120.0, 200.0, 250.0)]
    report = optimal_mu_derivative_check(params, alphas)
    assert report.all_nonpositive
    assert len(report.rows) == len(alphas)
    text = report.to_text()
    assert "OK" in text and len(text.splitlines()) == len(alphas) + 2


def test_universal_rate_decreases_past_one():
    # sampled monotone tail on [1, 2] for a few channel strengths
    params = STANDARD_FIBER
    for L in (0.0, 100.0, 200.0):
        alpha = alpha_of_distance(L, params)
        mus = np.linspace(1.0, 2.0, 11)
        for direction in ("forward", "reverse"):
            values = [universal_upper(float(m), alpha, params, direction) for m in mus]
            assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
