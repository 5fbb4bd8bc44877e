import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from torusflow.resonance import analyze
from torusflow.scalars import ONE, BasisConstant, RealScalar

SQRT2 = BasisConstant.sqrt(2)
SQRT3 = BasisConstant.sqrt(3)
SQRT5 = BasisConstant.sqrt(5)
CBRT2 = BasisConstant.root("cbrt2", (-2, 0, 0, 1), 1, 2)

ONE_S = RealScalar.from_rational(1)
SQRT2_S = RealScalar.from_constant(SQRT2)
SQRT3_S = RealScalar.from_constant(SQRT3)
GOLDEN_S = RealScalar.from_terms({ONE: Fraction(-1, 2), SQRT5: Fraction(1, 2)})
CBRT2_S = RealScalar.from_constant(CBRT2)


def scalar(rational=0, **symbols) -> RealScalar:
    table = {"sqrt2": SQRT2, "sqrt3": SQRT3, "sqrt5": SQRT5, "cbrt2": CBRT2}
    coeffs = {ONE: Fraction(rational)}
    for name, value in symbols.items():
        coeffs[table[name]] = Fraction(value)
    return RealScalar.from_terms(coeffs)


@pytest.fixture(scope="session")
def data_sqrt2():
    return analyze((ONE_S, SQRT2_S))


@pytest.fixture(scope="session")
def data_sqrt2_sum():
    return analyze((ONE_S, SQRT2_S, ONE_S + SQRT2_S))


@pytest.fixture(scope="session")
def data_sqrt2_sqrt3():
    return analyze((ONE_S, SQRT2_S, SQRT3_S))


@pytest.fixture(scope="session")
def data_half():
    return analyze((ONE_S, RealScalar.from_rational(Fraction(1, 2))))
