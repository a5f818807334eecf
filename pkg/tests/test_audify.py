import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from starsong.audify import (
    AudifyConfig,
    DimensionlessMode,
    Rounding,
    derive_dimensionless,
    star_partials,
    to_partials,
)
from starsong.catalog import PulsationMode, StarRecord

TABLE_COMPAT = AudifyConfig(rounding=Rounding.TABLE_COMPAT)


def test_reference_star_first_mode(v465):
    dims = derive_dimensionless(v465)
    assert dims[0].relative_frequency == pytest.approx(14.040 / 13.721, abs=1e-12)
    assert dims[0].loudness == 1.0
    assert dims[0].start == 0.0


def test_reference_star_third_mode_start(v465):
    dims = derive_dimensionless(v465)
    assert dims[2].start == pytest.approx(2.07, abs=1e-12)


def test_single_mode_star_self_ratios(single_mode_star):
    (dim,) = derive_dimensionless(single_mode_star)
    assert (dim.relative_frequency, dim.loudness, dim.start) == (1.0, 1.0, 0.0)


def test_invalid_star_rejected():
    star = StarRecord("x", "X", (PulsationMode(1.0, -1.0, 0.0),))
    with pytest.raises(ValueError):
        derive_dimensionless(star)


def test_table_compat_frequencies(v465):
    partials = star_partials(v465, TABLE_COMPAT)
    # exact: rounded ratio times the base pitch
    assert partials[0].frequency_hz == pytest.approx(1.023 * 261.630, abs=1e-12)
    # published 3-decimal values
    for partial, expected in zip(partials, (267.647, 328.084, 634.191, 261.630)):
        assert partial.frequency_hz == pytest.approx(expected, abs=5e-4)


def test_to_partials_passthrough_of_loudness_and_start():
    dims = [DimensionlessMode(1.254, 0.657, 2.19)]
    (p,) = to_partials(dims, TABLE_COMPAT)
    assert p.frequency_hz == pytest.approx(328.084, abs=5e-4)
    assert p.amplitude == 0.657
    assert p.start_s == 2.19


def test_identity_scaling_at_base_440():
    (p,) = to_partials([DimensionlessMode(1.0, 1.0, 0.0)], AudifyConfig(base_hz=440.0))
    assert (p.frequency_hz, p.amplitude, p.start_s) == (440.0, 1.0, 0.0)


def test_full_precision_lowest_mode_hits_base_exactly(v465):
    cfg = AudifyConfig(base_hz=261.630, rounding=Rounding.FULL_PRECISION)
    partials = star_partials(v465, cfg)
    lowest = min(partials, key=lambda p: p.frequency_hz)
    assert lowest.frequency_hz == 261.630


def test_out_of_audible_range_names_mode():
    dims = [DimensionlessMode(1.0, 1.0, 0.0), DimensionlessMode(100.0, 0.5, 0.0)]
    with pytest.raises(ValueError, match="mode 1"):
        to_partials(dims, AudifyConfig(base_hz=261.630))


def test_negative_start_rejected():
    with pytest.raises(ValueError, match="negative start"):
        to_partials([DimensionlessMode(1.0, 1.0, -0.5)])


def test_empty_dims_rejected():
    with pytest.raises(ValueError):
        to_partials([])


def _distinct_star(freqs, amps, phases):
    modes = tuple(PulsationMode(f, a, p) for f, a, p in zip(freqs, amps, phases))
    return StarRecord("h", "H", modes)


finite = dict(allow_nan=False, allow_infinity=False)
# frequencies from strictly positive gaps, so they stay distinct under scaling
star_inputs = st.integers(2, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0.1, 100, **finite), min_size=n, max_size=n).map(
            lambda gaps: [0.1 + sum(gaps[: i + 1]) for i in range(len(gaps))]
        ),
        st.lists(st.floats(0.1, 50, **finite), min_size=n, max_size=n),
        st.lists(st.floats(-6, 6, **finite), min_size=n, max_size=n),
    )
)


@given(star_inputs, st.floats(0.01, 100, **finite))
def test_scale_invariance(inputs, k):
    freqs, amps, phases = inputs
    base = derive_dimensionless(_distinct_star(freqs, amps, phases))

    scaled_f = derive_dimensionless(_distinct_star([f * k for f in freqs], amps, phases))
    assert all(
        a.relative_frequency == pytest.approx(b.relative_frequency, rel=1e-9)
        for a, b in zip(base, scaled_f)
    )

    scaled_a = derive_dimensionless(_distinct_star(freqs, [a * k for a in amps], phases))
    assert all(a.loudness == pytest.approx(b.loudness, rel=1e-9) for a, b in zip(base, scaled_a))

    shifted = derive_dimensionless(_distinct_star(freqs, amps, [p + k for p in phases]))
    assert all(a.start == pytest.approx(b.start, abs=1e-6) for a, b in zip(base, shifted))


@given(star_inputs)
def test_frequency_order_preserved(inputs):
    freqs, amps, phases = inputs
    star = _distinct_star(freqs, amps, phases)
    try:
        partials = star_partials(star, AudifyConfig(base_hz=100.0, audible_min_hz=1.0, audible_max_hz=10**6))
    except ValueError:
        return  # outside the audible window; ordering is vacuous
    by_hz = sorted(range(len(freqs)), key=lambda i: partials[i].frequency_hz)
    by_cpd = sorted(range(len(freqs)), key=lambda i: star.modes[i].frequency_cpd)
    assert by_hz == by_cpd
