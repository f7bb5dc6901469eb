from fractions import Fraction

import pytest

from cantordiff.cantor import middle_pair
from cantordiff.scalars import GOLDEN, Scalar


def rat(x) -> Scalar:
    return Scalar.rational(Fraction(x))


@pytest.fixture(scope="session")
def gamma() -> Scalar:
    return GOLDEN.generator()


@pytest.fixture(scope="session")
def golden_pair(gamma):
    return middle_pair(gamma**-3, gamma**-2)


@pytest.fixture(scope="session")
def third_pair():
    return middle_pair(rat("1/3"), rat("1/3"))


@pytest.fixture(scope="session")
def quarter_pair():
    return middle_pair(rat("1/4"), rat("1/4"))


@pytest.fixture(scope="session")
def two_fifths_pair():
    return middle_pair(rat("2/5"), rat("2/5"))
