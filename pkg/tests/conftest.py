"""Shared fixtures: standard model points and compiled-kernel warmup."""

from __future__ import annotations

import numpy as np
import pytest

from chamneut.bouncer import BouncerPotentialSpec, find_level
from chamneut.chameleon import ChameleonParams
from chamneut.pde import make_box, solve_box


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger numba compilation before any timed test runs."""
    find_level(BouncerPotentialSpec.pure_gravity(), 1, tol_pev=1e-3,
               step_um=0.5, zmax_um=30.0)
    p = ChameleonParams(n=2, beta=1e9, lambda_ev=2.4e-3)
    solve_box(p, make_box(p, 1e-2, 9), tol=1e-3, max_iter=8)


@pytest.fixture
def p_n2():
    return ChameleonParams(n=2, beta=1e9, lambda_ev=2.4e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(20260813)
