"""Shared helpers for the test suite."""

import numpy as np
import pytest

from stiefelgen.stiefel import StiefelPoint


def random_stiefel(m: int, n: int, rng: np.random.Generator, complex_field: bool = False) -> StiefelPoint:
    """Random point on St(m, n) via QR of a Gaussian matrix."""
    if complex_field:
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    else:
        a = rng.standard_normal((m, n))
    q, r = np.linalg.qr(a)
    # fix the phase/sign so the draw is well defined
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return StiefelPoint(q * (d / np.abs(d)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
