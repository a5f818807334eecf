import pytest

from starsong.catalog import PulsationMode, StarRecord, builtin_v465_per, save_catalog

#: reference parameter table for the bundled star: each row is
#: (freq c/d, amp mmag, phase, rel. frequency, loudness, start, Hz at 261.630)
V465_TABLE = (
    (14.040, 3.5, -0.14, 1.023, 1.000, 0.00, 267.647),
    (17.208, 2.3, 2.05, 1.254, 0.657, 2.19, 328.084),
    (33.259, 1.7, 1.93, 2.424, 0.488, 2.07, 634.191),
    (13.721, 1.1, 3.55, 1.000, 0.314, 3.69, 261.630),
)


@pytest.fixture
def v465():
    return builtin_v465_per()


@pytest.fixture
def single_mode_star():
    return StarRecord(id="mono", name="Mono", modes=(PulsationMode(10.0, 1.0, 0.5),))


@pytest.fixture
def catalog_file(tmp_path, v465, single_mode_star):
    path = tmp_path / "catalog.csv"
    save_catalog([v465, single_mode_star], path)
    return path
