import math

import numpy as np
import pytest

from hrnsim.channels import (
    ChannelModel,
    SystemParams,
    build_channel_set,
    dbm2watt,
)
from hrnsim.geometry import (
    NetworkLayout,
    Position,
    RisScenario,
    ris_assisted_layout,
    symmetric_hrn_layout,
)
from hrnsim.pso import PsoParams, phase_optimizer
from hrnsim.relaying import (
    Duplex,
    Protocol,
    RateResult,
    SchemeSpec,
    Topology,
    evaluate_scheme,
    rate_fd_af,
    rate_fd_df,
    rate_hd_af,
    rate_hd_df,
)
from hrnsim.ris import RisPhaseVector, align_phases

ALL_CODES = [
    "hybrid-hd-df", "hybrid-hd-af", "hybrid-fd-df", "hybrid-fd-af",
    "relay-hd-df", "relay-hd-af", "relay-fd-df", "relay-fd-af",
    "ris-near-alice", "ris-midpoint",
]

RATE_HD_AF_UNIT = 0.20751874963942188  # 0.5*log2(4/3)


def zero_phase_optimizer(fitness, dim, seeds):
    return RisPhaseVector(np.zeros(dim))


def make_seed_recorder(record):
    def run(fitness, dim, seeds):
        record.extend(np.array(s, copy=True) for s in seeds)
        return RisPhaseVector(np.zeros(dim))
    return run


# ---------------------------------------------------------------------------
# closed-form rate laws


def test_hd_df_examples():
    assert rate_hd_df(3.0, 3.0) == pytest.approx(1.0, rel=1e-15)
    assert rate_hd_df(3.0, 15.0) == pytest.approx(1.0, rel=1e-15)
    assert rate_hd_df(0.0, 5.0) == 0.0


def test_hd_af_examples():
    assert rate_hd_af(1.0, 1.0) == pytest.approx(RATE_HD_AF_UNIT, rel=1e-12)
    assert rate_hd_af(0.0, 7.0) == 0.0
    # one infinitely strong hop leaves the cascade limited by the other
    assert rate_hd_af(3.0, 1e15) == pytest.approx(0.5 * math.log2(4.0), rel=1e-9)


def test_fd_df_examples():
    assert rate_fd_df(3.0, 3.0) == pytest.approx(2.0, rel=1e-15)
    assert rate_fd_df(1.0, 7.0) == pytest.approx(1.0, rel=1e-15)
    assert rate_fd_df(4.0, 4.0) == pytest.approx(2.0 * rate_hd_df(4.0, 4.0), rel=1e-15)


def test_af_never_beats_df_on_same_snrs():
    rng = np.random.default_rng(101)
    snrs = 10.0 ** rng.uniform(-6.0, 6.0, size=(10_000, 2))
    for g1, g2 in snrs:
        assert rate_hd_af(g1, g2) <= rate_hd_df(g1, g2) + 1e-12


def test_fd_af_reduces_to_cascade_without_si():
    params = SystemParams(total_tx_power=0.1)
    q = 0.5 * params.total_tx_power
    g1, g2 = 3.0e-11, 8.0e-12
    snr1 = q * g1 / params.noise_power
    snr2 = q * g2 / params.noise_power
    cascade = snr1 * snr2 / (snr1 + snr2 + 1.0)
    got = rate_fd_af(g1, params.noise_power, g2, 0.0, params)
    assert got == pytest.approx(math.log2(1.0 + cascade), rel=1e-12)


def test_fd_af_staged_arithmetic_oracle():
    # every stage written out by hand: amplification, signal, noise floor
    noise = 3.981071705534969e-13
    p_si = 2.0 * noise
    params = SystemParams(total_tx_power=0.1, noise_power=noise, residual_si_power=p_si)
    g1, g2, i_bob = 2.0e-10, 3.0e-9, 1.0e-13

    q = 0.05
    relay_input_floor = noise + p_si
    amp = q / (q * g1 + relay_input_floor)
    signal = q * amp * g1 * g2
    floor = amp * g2 * relay_input_floor + i_bob + noise
    expected = math.log2(1.0 + signal / floor)

    got = rate_fd_af(g1, relay_input_floor, g2, i_bob, params)
    assert got == pytest.approx(expected, rel=1e-12)


def test_fd_af_chokes_under_growing_si():
    params = SystemParams(total_tx_power=0.1)
    g1, g2 = 1.0e-9, 1.0e-9
    rates = [
        rate_fd_af(g1, params.noise_power * scale, g2, 0.0, params)
        for scale in (1.0, 1e3, 1e6, 1e9, 1e12)
    ]
    assert all(b < a for a, b in zip(rates, rates[1:]))
    assert rates[-1] < 1e-6


def test_rate_laws_reject_negative_inputs():
    with pytest.raises(ValueError):
        rate_hd_df(-1.0, 1.0)
    with pytest.raises(ValueError):
        rate_hd_af(1.0, -1.0)
    with pytest.raises(ValueError):
        rate_fd_df(-0.5, 1.0)
    with pytest.raises(ValueError):
        rate_fd_af(-1e-9, 0.0, 1e-9, 0.0, SystemParams())


# ---------------------------------------------------------------------------
# scheme descriptors


def test_scheme_codes_round_trip():
    for code in ALL_CODES:
        assert SchemeSpec.from_code(code).code == code


def test_scheme_code_rejects_unknown():
    with pytest.raises(ValueError) as excinfo:
        SchemeSpec.from_code("hybrid-xx-df")
    assert "hybrid-fd-df" in str(excinfo.value)


def test_scheme_spec_field_constraints():
    with pytest.raises(ValueError):
        SchemeSpec(Topology.RIS_ONLY)  # needs a placement scenario
    with pytest.raises(ValueError):
        SchemeSpec(Topology.RIS_ONLY, duplex=Duplex.HALF, ris_scenario=RisScenario.MIDPOINT)
    with pytest.raises(ValueError):
        SchemeSpec(Topology.HYBRID, duplex=Duplex.HALF)  # missing protocol
    with pytest.raises(ValueError):
        SchemeSpec(Topology.RELAY_ONLY, duplex=Duplex.FULL, protocol=Protocol.DECODE_FORWARD,
                   ris_scenario=RisScenario.MIDPOINT)


# ---------------------------------------------------------------------------
# scheme evaluation


def hybrid_setup(m=16, pt_dbm=20.0, si_over_noise_db=0.0, seed=7):
    layout = symmetric_hrn_layout(300.0, 15.0)
    params = SystemParams.from_link_budget(pt_dbm, si_over_noise_db=si_over_noise_db, rng_seed=seed)
    channels = build_channel_set(layout, ChannelModel.UMI, m, params)
    return layout, channels, params


def test_ris_only_matches_aligned_cascade_closed_form():
    layout = ris_assisted_layout(300.0, RisScenario.NEAR_ALICE, 15.0)
    params = SystemParams.from_link_budget(20.0, rng_seed=3)
    channels = build_channel_set(layout, ChannelModel.UMI, 32, params)
    result = evaluate_scheme(SchemeSpec.from_code("ris-near-alice"), layout, channels, params)

    best = float(np.sum(np.abs(channels.alice_ris) * np.abs(channels.ris_bob)))
    snr = params.total_tx_power * best**2 / params.noise_power
    # passive surface serves the whole slot: full-rate log, no half factor
    assert result.rate == pytest.approx(math.log2(1.0 + snr), rel=1e-12)
    assert result.sinr_hop1 == result.sinr_hop2 == pytest.approx(snr, rel=1e-12)


def test_hybrid_hd_df_hits_exact_rate_at_chosen_power():
    layout, channels, params = hybrid_setup()
    g1 = (abs(channels.alice_relay.value)
          + float(np.sum(np.abs(channels.alice_ris * channels.ris_relay)))) ** 2
    g2 = (abs(channels.relay_bob.value)
          + float(np.sum(np.abs(channels.ris_relay * channels.ris_bob)))) ** 2
    # pick the budget that puts the weaker hop exactly at SNR 3
    from dataclasses import replace
    tuned = replace(params, total_tx_power=3.0 * params.noise_power / min(g1, g2))
    result = evaluate_scheme(SchemeSpec.from_code("hybrid-hd-df"), layout, channels, tuned)
    assert result.rate == pytest.approx(1.0, rel=1e-12)
    assert min(result.sinr_hop1, result.sinr_hop2) == pytest.approx(3.0, rel=1e-12)


def test_hd_df_rate_consistent_with_reported_sinrs():
    layout, channels, params = hybrid_setup()
    result = evaluate_scheme(SchemeSpec.from_code("hybrid-hd-df"), layout, channels, params)
    assert result.rate == pytest.approx(
        0.5 * math.log2(1.0 + min(result.sinr_hop1, result.sinr_hop2)), rel=1e-12
    )
    assert len(result.phase_config) == 2  # one surface configuration per hop


def test_zero_element_hybrid_degenerates_to_relay_only():
    layout = symmetric_hrn_layout(300.0, 15.0)
    params = SystemParams.from_link_budget(20.0, si_over_noise_db=5.0, rng_seed=11)
    channels = build_channel_set(layout, ChannelModel.UMI, 0, params)
    for duplex in ("hd", "fd"):
        for protocol in ("df", "af"):
            hybrid = evaluate_scheme(
                SchemeSpec.from_code(f"hybrid-{duplex}-{protocol}"), layout, channels, params
            )
            relay = evaluate_scheme(
                SchemeSpec.from_code(f"relay-{duplex}-{protocol}"), layout, channels, params
            )
            assert hybrid.rate == pytest.approx(relay.rate, rel=1e-12)
            assert hybrid.sinr_hop1 == pytest.approx(relay.sinr_hop1, rel=1e-12)


def test_hybrid_hd_never_below_relay_only_hd():
    for seed in range(5):
        layout, channels, params = hybrid_setup(m=32, seed=seed)
        for protocol in ("df", "af"):
            hybrid = evaluate_scheme(
                SchemeSpec.from_code(f"hybrid-hd-{protocol}"), layout, channels, params
            )
            relay = evaluate_scheme(
                SchemeSpec.from_code(f"relay-hd-{protocol}"), layout, channels, params
            )
            assert hybrid.rate >= relay.rate


def test_hybrid_fd_optimizer_beats_zero_phases():
    layout, channels, params = hybrid_setup(m=16)
    spec = SchemeSpec.from_code("hybrid-fd-df")
    untuned = evaluate_scheme(spec, layout, channels, params, zero_phase_optimizer)
    tuned = evaluate_scheme(
        spec, layout, channels, params,
        phase_optimizer(PsoParams(particle_count=60, iteration_count=30, seed=0)),
    )
    assert tuned.rate >= untuned.rate


def test_hybrid_fd_seeds_start_from_hop1_alignment():
    layout, channels, params = hybrid_setup(m=8)
    recorded = []
    evaluate_scheme(
        SchemeSpec.from_code("hybrid-fd-df"), layout, channels, params,
        make_seed_recorder(recorded),
    )
    expected = align_phases(
        channels.alice_ris, channels.ris_relay, reference=channels.alice_relay
    )
    assert len(recorded) >= 1
    assert recorded[0] == pytest.approx(expected.phases, abs=1e-12)


def test_hybrid_fd_df_leak_raises_bob_noise_floor():
    layout, channels, params = hybrid_setup(m=16)
    spec = SchemeSpec.from_code("hybrid-fd-df")
    result = evaluate_scheme(spec, layout, channels, params, zero_phase_optimizer)
    q = 0.5 * params.total_tx_power
    phasor = np.ones(16, dtype=complex)
    g2 = abs(channels.relay_bob.value + np.sum(channels.ris_relay * channels.ris_bob * phasor)) ** 2
    leak = q * abs(np.sum(channels.alice_ris * channels.ris_bob * phasor)) ** 2
    assert result.sinr_hop2 == pytest.approx(
        q * g2 / (params.noise_power + leak), rel=1e-12
    )


def test_every_scheme_rate_nondecreasing_in_power():
    layout, channels, _ = hybrid_setup(m=16)
    for code in ALL_CODES:
        spec = SchemeSpec.from_code(code)
        eval_layout = layout if spec.topology is not Topology.RIS_ONLY else None
        if spec.topology is Topology.RIS_ONLY:
            eval_layout = ris_assisted_layout(300.0, spec.ris_scenario, 15.0)
            eval_channels = build_channel_set(
                eval_layout, ChannelModel.UMI, 16, SystemParams(rng_seed=7)
            )
        else:
            eval_channels = channels
        previous = -1.0
        for pt_dbm in (0.0, 10.0, 20.0, 30.0, 40.0):
            params = SystemParams.from_link_budget(pt_dbm, si_over_noise_db=3.0, rng_seed=7)
            # fixed phases isolate the power axis from optimizer noise
            rate = evaluate_scheme(
                spec, eval_layout, eval_channels, params, zero_phase_optimizer
            ).rate
            assert rate >= previous
            previous = rate


def test_relay_midpoint_maximizes_hd_df_rate():
    alice, bob = Position(0.0, 0.0), Position(300.0, 0.0)
    params = SystemParams.from_link_budget(20.0, rng_seed=0)
    spec = SchemeSpec.from_code("relay-hd-df")
    rates = []
    for x in np.linspace(30.0, 270.0, 21):
        layout = NetworkLayout(alice=alice, bob=bob, relay=Position(float(x), 0.0))
        channels = build_channel_set(layout, ChannelModel.FREE_SPACE, 0, params)
        rates.append(evaluate_scheme(spec, layout, channels, params).rate)
    assert int(np.argmax(rates)) == 10  # center of the 21-point sweep


def test_rate_result_is_immutable_record():
    result = RateResult(rate=1.0, sinr_hop1=3.0, sinr_hop2=3.0)
    with pytest.raises(AttributeError):
        result.rate = 2.0


# ---------------------------------------------------------------------------
# structural errors


def test_hybrid_fd_requires_an_optimizer():
    layout, channels, params = hybrid_setup(m=4)
    with pytest.raises(ValueError):
        evaluate_scheme(SchemeSpec.from_code("hybrid-fd-df"), layout, channels, params)


def test_layout_scheme_mismatch_rejected():
    relay_free = ris_assisted_layout(300.0, RisScenario.MIDPOINT, 15.0)
    params = SystemParams(rng_seed=0)
    channels = build_channel_set(relay_free, ChannelModel.UMI, 8, params)
    with pytest.raises(ValueError):
        evaluate_scheme(SchemeSpec.from_code("relay-hd-df"), relay_free, channels, params)
    with pytest.raises(ValueError):
        evaluate_scheme(SchemeSpec.from_code("hybrid-hd-df"), relay_free, channels, params)


def test_channel_set_missing_links_rejected():
    hybrid_layout = symmetric_hrn_layout(300.0, 15.0)
    ris_layout = ris_assisted_layout(300.0, RisScenario.MIDPOINT, 15.0)
    params = SystemParams(rng_seed=0)
    ris_channels = build_channel_set(ris_layout, ChannelModel.UMI, 8, params)
    # layout claims a relay but the channel set was drawn without one
    with pytest.raises(ValueError):
        evaluate_scheme(
            SchemeSpec.from_code("relay-hd-df"), hybrid_layout, ris_channels, params
        )
