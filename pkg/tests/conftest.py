"""Shared fixtures: coarse variants of the standard scenarios for unit tests.

The paper-scale runs (dx = 5e-3, T = 30) live in test_acceptance.py; unit
tests use dx = 0.02 / short horizons so the whole suite stays fast.
"""

import numpy as np
import pytest

import ringflow as rf


@pytest.fixture(scope="session")
def coarse_overtaking():
    """Short saturated overtaking run with 20 recorded steps."""
    sc = rf.preset_overtaking(dx=0.02, T=3.0)
    prep = rf.prepare(sc)
    record = np.unique(np.round(np.linspace(0, prep.time_grid.n_steps - 1, 20)).astype(int))
    return rf.run(sc, record_steps=record)


@pytest.fixture(scope="session")
def paper_grid():
    return rf.Grid.build(0.0, 2.0, 5e-3)
