import random

import numpy as np
import pytest

from starsong.audify import AudifyConfig
from starsong.catalog import PulsationMode, StarRecord, builtin_v465_per
from starsong.perform import state as st

ACFG = AudifyConfig()

# loudness values of the reference star, frequency ascending
L_BY_FREQ = (1.1 / 3.5, 1.0, 2.3 / 3.5, 1.7 / 3.5)


def silent_loader(path: str) -> np.ndarray:
    if path == "missing.wav":
        raise FileNotFoundError(path)
    return np.linspace(0, 0.1, 2048)


def fresh_state(extra_stars=()):
    return st.initial_state([builtin_v465_per(), *extra_stars])


def drive(state, *messages):
    replies = []
    for msg in messages:
        state, reply = st.apply_control(state, msg, ACFG, silent_loader)
        replies.append(reply)
    return state, replies


def test_list_stars_reply():
    _, (reply,) = drive(fresh_state(), {"op": "list_stars"})
    assert reply["ok"] and reply["stars"] == [{"id": "v465_per", "name": "V465 Per", "modes": 4}]


def test_select_star_resets_gains():
    state, replies = drive(
        fresh_state(),
        {"op": "select_star", "id": "v465_per"},
        {"op": "set_gain", "index": 2, "value": 0.5},
        {"op": "select_star", "id": "v465_per"},
    )
    assert replies[-1]["gains"] == [1.0, 1.0, 1.0, 1.0]
    assert state.partial_gains == (1.0, 1.0, 1.0, 1.0)


def test_select_unknown_star():
    state, (reply,) = drive(fresh_state(), {"op": "select_star", "id": "nope"})
    assert not reply["ok"] and "unknown star" in reply["error"]
    assert state.selected_star is None


def test_partials_sorted_by_frequency():
    state, _ = drive(fresh_state(), {"op": "select_star", "id": "v465_per"})
    freqs = [cp.frequency_hz for cp in state.partials]
    assert freqs == sorted(freqs)
    assert [cp.loudness for cp in state.partials] == pytest.approx(L_BY_FREQ)


def test_luminosity_after_muting_strongest_partial():
    state, replies = drive(
        fresh_state(),
        {"op": "select_star", "id": "v465_per"},
        {"op": "set_gain", "index": 1, "value": 0.0},  # index 1 holds loudness 1.0
    )
    expected = (L_BY_FREQ[0] + L_BY_FREQ[2] + L_BY_FREQ[3]) / sum(L_BY_FREQ)
    assert replies[-1]["luminosity"] == pytest.approx(expected)
    assert expected == pytest.approx(0.593, abs=5e-4)


def test_luminosity_map_idles_unselected():
    other = StarRecord("o", "Other", (PulsationMode(10.0, 1.0, 0.0),))
    state, _ = drive(fresh_state([other]), {"op": "select_star", "id": "v465_per"})
    values = st.luminosities(state)
    assert values["o"] == st.IDLE_LUMINOSITY
    assert values["v465_per"] == 1.0


def test_no_selection_all_idle():
    values = st.luminosities(fresh_state())
    assert values == {"v465_per": st.IDLE_LUMINOSITY}


def test_set_gain_out_of_range_index():
    _, (reply,) = drive(fresh_state(), {"op": "set_gain", "index": 7, "value": 0.5})
    assert not reply["ok"] and "index out of range" in reply["error"]


def test_set_gain_rejects_out_of_range_value():
    state, replies = drive(
        fresh_state(),
        {"op": "select_star", "id": "v465_per"},
        {"op": "set_gain", "index": 0, "value": 1.5},
        {"op": "set_gain", "index": 0, "value": float("nan")},
        {"op": "set_gain", "index": 0, "value": "high"},
    )
    assert all(not r["ok"] for r in replies[1:])
    assert state.partial_gains == (1.0, 1.0, 1.0, 1.0)  # never clamped silently


def test_set_gain_requires_selection():
    _, (reply,) = drive(fresh_state(), {"op": "set_gain", "index": 0, "value": 0.5})
    assert not reply["ok"]


def test_set_gain_idempotent():
    msgs = [
        {"op": "select_star", "id": "v465_per"},
        {"op": "set_gain", "index": 2, "value": 0.25},
        {"op": "set_gain", "index": 2, "value": 0.25},
    ]
    state, replies = drive(fresh_state(), *msgs)
    assert state.partial_gains == (1.0, 1.0, 0.25, 1.0)
    assert replies[1] == replies[2]


def test_unknown_op():
    _, (reply,) = drive(fresh_state(), {"op": "explode"})
    assert not reply["ok"] and "unknown op" in reply["error"]


def test_trigger_unloaded_slot():
    _, (reply,) = drive(fresh_state(), {"op": "trigger_sample", "slot": "bison"})
    assert not reply["ok"] and "no sample loaded" in reply["error"]


def test_sample_lifecycle():
    state, replies = drive(
        fresh_state(),
        {"op": "load_sample", "slot": "bison", "path": "bison.wav"},
        {"op": "trigger_sample", "slot": "bison"},
        {"op": "stop_sample", "slot": "bison"},
        {"op": "trigger_sample", "slot": "bison"},
    )
    assert [r["ok"] for r in replies] == [True, True, True, True]
    assert replies[0]["frames"] == 2048
    (sample,) = state.samples
    assert sample.playing and sample.generation == 2  # two triggers so far


def test_load_sample_failure_reported():
    state, (reply,) = drive(fresh_state(), {"op": "load_sample", "slot": "x", "path": "missing.wav"})
    assert not reply["ok"] and "missing.wav" in reply["error"]
    assert state.samples == ()


def test_subscribe_rate_validation():
    _, replies = drive(
        fresh_state(),
        {"op": "subscribe_luminosity", "rate_hz": 30},
        {"op": "subscribe_luminosity", "rate_hz": 0},
        {"op": "subscribe_luminosity", "rate_hz": 61},
    )
    assert replies[0]["ok"] and replies[0]["rate_hz"] == 30.0
    assert not replies[1]["ok"] and not replies[2]["ok"]


def test_filter_q_validation():
    state, replies = drive(
        fresh_state(),
        {"op": "set_filter_q", "value": 40.0},
        {"op": "set_filter_q", "value": 0.0},
    )
    assert replies[0]["ok"] and state.filter_q == 40.0
    assert not replies[1]["ok"]


def test_non_dict_message():
    state = fresh_state()
    _, reply = st.apply_control(state, [1, 2], ACFG, silent_loader)
    assert not reply["ok"]


def test_many_mode_star_exposes_four_loudest():
    modes = tuple(PulsationMode(10.0 + i, 1.0 + i * 0.5, 0.1 * i) for i in range(6))
    big = StarRecord("big", "Big", modes)
    state, _ = drive(fresh_state([big]), {"op": "select_star", "id": "big"})
    assert len(state.partials) == 4
    kept = sorted(cp.loudness for cp in state.partials)
    all_loudness = sorted(m.amplitude_mmag / 3.5 for m in modes)[-4:]
    assert kept == pytest.approx(all_loudness)


def test_small_star_trailing_gains_inert(single_mode_star):
    state, replies = drive(
        fresh_state([single_mode_star]),
        {"op": "select_star", "id": "mono"},
        {"op": "set_gain", "index": 3, "value": 0.0},  # inert: star has 1 partial
    )
    assert len(state.partials) == 1
    assert replies[-1]["ok"]
    assert replies[-1]["luminosity"] == 1.0


def luminosity_oracle(state: st.SessionState) -> float | None:
    if state.selected_star is None:
        return None
    weighted = total = 0.0
    for cp, gain in zip(state.partials, state.partial_gains):
        weighted += cp.loudness * gain
        total += cp.loudness
    return weighted / total if total else None


def random_message(rng: random.Random) -> dict:
    roll = rng.random()
    if roll < 0.1:
        return {"op": "list_stars"}
    if roll < 0.25:
        return {"op": "select_star", "id": rng.choice(["v465_per", "mono", "ghost"])}
    if roll < 0.65:
        return {"op": "set_gain", "index": rng.randint(-1, 5), "value": round(rng.uniform(-0.2, 1.2), 3)}
    if roll < 0.75:
        return {"op": "load_sample", "slot": rng.choice("abc"), "path": "s.wav"}
    if roll < 0.85:
        return {"op": rng.choice(["trigger_sample", "stop_sample"]), "slot": rng.choice("abcd")}
    if roll < 0.92:
        return {"op": "set_filter_q", "value": round(rng.uniform(-5, 1200), 2)}
    if roll < 0.97:
        return {"op": "subscribe_luminosity", "rate_hz": round(rng.uniform(-10, 80), 1)}
    return {"op": rng.choice(["bogus", None, 42])}


def test_luminosity_invariant_random_walk(single_mode_star):
    rng = random.Random(20260809)
    state = fresh_state([single_mode_star])
    for _ in range(3000):
        state, reply = st.apply_control(state, random_message(rng), ACFG, silent_loader)
        expected = luminosity_oracle(state)
        if reply["ok"]:
            assert reply["luminosity"] == pytest.approx(expected) if expected is not None else reply["luminosity"] is None
        assert all(0.0 <= g <= 1.0 for g in state.partial_gains)
        lum = st.selected_luminosity(state)
        if lum is not None:
            assert 0.0 <= lum <= 1.0
            assert lum == pytest.approx(expected)


def test_replay_determinism(single_mode_star):
    rng = random.Random(11)
    messages = [random_message(rng) for _ in range(500)]

    def run():
        state = fresh_state([single_mode_star])
        snapshots = []
        for msg in messages:
            state, reply = st.apply_control(state, msg, ACFG, silent_loader)
            snapshots.append((reply, state.selected_star, state.partial_gains, state.filter_q))
        return snapshots

    assert run() == run()


def test_engine_snapshot_contents():
    state, _ = drive(
        fresh_state(),
        {"op": "select_star", "id": "v465_per"},
        {"op": "set_gain", "index": 0, "value": 0.5},
    )
    snap = st.engine_snapshot(state)
    assert snap.partial_freqs == tuple(cp.frequency_hz for cp in state.partials)
    assert snap.partial_amps[0] == pytest.approx(L_BY_FREQ[0] * 0.5)
    assert snap.partial_amps[1:] == pytest.approx(L_BY_FREQ[1:])


def test_empty_catalog_rejected():
    with pytest.raises(ValueError):
        st.initial_state([])
