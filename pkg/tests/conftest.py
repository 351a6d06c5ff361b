from fractions import Fraction

import pytest

from svetlichny.strategies import DeterministicStrategy


# Rows of the four-party polynomial: A1^{x1} A2^{x2} (... A3 A4 signs ...), signs
# listed for (x3, x4) = 00, 01, 10, 11.
S4_ROWS = {
    (0, 0): (-1, 1, 1, 1),
    (1, 0): (1, 1, 1, -1),
    (0, 1): (1, 1, 1, -1),
    (1, 1): (1, -1, -1, -1),
}


def s4_coefficient(x):
    bits = [(x >> i) & 1 for i in range(4)]
    return Fraction(S4_ROWS[bits[0], bits[1]][2 * bits[2] + bits[3]], 4)


def four_party_strategy() -> DeterministicStrategy:
    """a1 = x1x3+x1, a2 = x1x2+x2, a3 = x2x3+x3x4+x3, a4 = x1x4+x2x4+x4+1."""
    return DeterministicStrategy.from_functions(
        4,
        [(1, 3), (1, 2), (2, 3, 4), (1, 2, 4)],
        [
            lambda x: x[1] * x[3] + x[1],
            lambda x: x[1] * x[2] + x[2],
            lambda x: x[2] * x[3] + x[3] * x[4] + x[3],
            lambda x: x[1] * x[4] + x[2] * x[4] + x[4] + 1,
        ],
    )


@pytest.fixture
def s4_strategy():
    return four_party_strategy()
