from __future__ import annotations

import math

import numpy as np
import pytest

from horolab.geometry import Isometry, UnitTangent


def iwasawa(x: float, t: float, theta: float) -> Isometry:
    """Generic frame n_x a_t k_theta; covers the whole isometry group."""
    n = Isometry(1.0, x, 0.0, 1.0)
    a = Isometry(math.exp(0.5 * t), 0.0, 0.0, math.exp(-0.5 * t))
    k = Isometry(math.cos(theta), -math.sin(theta), math.sin(theta), math.cos(theta))
    return n @ a @ k


def random_frame(rng: np.random.Generator, spread: float = 2.0) -> UnitTangent:
    return UnitTangent(
        iwasawa(
            spread * rng.standard_normal(),
            spread * rng.standard_normal() * 0.5,
            rng.uniform(-math.pi, math.pi),
        )
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
