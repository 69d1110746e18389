"""Shared systems used across the test modules."""

import pytest

from lienard_lab import CMonicPolynomial, RawPolynomial


@pytest.fixture
def linear_center():
    """F = 0: every orbit is a circle, the return map is the identity."""
    return RawPolynomial((0.0,))


@pytest.fixture
def cubic_vdp():
    """F = x^3 - x: the classic cubic system with one attracting cycle."""
    return RawPolynomial((0.0, -1.0, 0.0, 1.0))


@pytest.fixture
def quartic():
    """F = x^4 + x: certified-class representative with a1 = 1."""
    return CMonicPolynomial(4, 4.0, (1.0, 0.0, 0.0))


@pytest.fixture
def quartic_cycle():
    """F = x^4 + x^3 - 0.15 x: certified-class system with one limit cycle."""
    return CMonicPolynomial(4, 4.0, (-0.15, 0.0, 1.0))
