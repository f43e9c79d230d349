import numpy as np
import pytest

from app.schemas.scenario_schema import C0, OfdmNumerology, ArrayGeometry, Scenario, Target

# Reduced numerology: same fc, delta_f and Tcp as the full-size frame, cp = 18 samples
SMALL_NUMEROLOGY = dict(fc=28e9, delta_f=120e3, nc=256, m=16, tcp=0.59e-6)


def range_for_samples(ns: int, numerology: OfdmNumerology) -> float:
    """Range whose round-trip delay is exactly ns samples"""
    return ns * C0 * numerology.ts / 2


@pytest.fixture
def default_numerology():
    return OfdmNumerology()


@pytest.fixture
def small_numerology():
    return OfdmNumerology(**SMALL_NUMEROLOGY)


@pytest.fixture
def geometry(small_numerology):
    return ArrayGeometry(nt=16, nr=16, wavelength=small_numerology.wavelength)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_scenario(small_numerology):
    """Two static targets at integer delays: Ns=102/Ne=84 (about 498 m) and Ns=53/Ne=35 (about 259 m)"""
    return Scenario(
        numerology=small_numerology,
        targets=[
            Target(range_m=range_for_samples(102, small_numerology), velocity_mps=0.0, angle_deg=0.0, rcs_m2=10.0),
            Target(range_m=range_for_samples(53, small_numerology), velocity_mps=0.0, angle_deg=2.0, rcs_m2=10.0),
        ],
        seed=7,
    )
