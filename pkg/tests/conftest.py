from fractions import Fraction

import numpy as np
import pytest

from cocycle_lab.config import (
    CocycleLabConfig,
    LimitsConfig,
    OutputFormat,
    ParallelConfig,
    RegularityConfig,
    ReportConfig,
    TorusConfig,
)
from cocycle_lab.groups import FiniteGroup, make_cyclic, make_product, make_symmetric
from cocycle_lab.modules import CoefficientGroup, GModule

from .helper import generate_test_data


@pytest.fixture(scope="session", autouse=True)
def write_data() -> None:
    generate_test_data()


@pytest.fixture
def cocycle_lab_config() -> CocycleLabConfig:
    return CocycleLabConfig(
        limits=LimitsConfig(max_entries=1_000_000, brute_force_limit=50_000),
        regularity=RegularityConfig(
            eta_scale=100, threshold_override=Fraction(1, 2), constants_file="constants.json"
        ),
        torus=TorusConfig(denominator_multiplier=2),
        report=ReportConfig(format=OutputFormat.table),
        parallel=ParallelConfig(threads=2),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def z2() -> FiniteGroup:
    return make_cyclic(2)


@pytest.fixture
def z4() -> FiniteGroup:
    return make_cyclic(4)


@pytest.fixture
def klein(z2: FiniteGroup) -> FiniteGroup:
    return make_product(z2, z2)


@pytest.fixture
def s3() -> FiniteGroup:
    return make_symmetric(3)


@pytest.fixture
def z2_mod2(z2: FiniteGroup) -> GModule:
    return GModule(z2, CoefficientGroup.finite([2]))


@pytest.fixture
def sign_module(s3: FiniteGroup) -> GModule:
    """Z with S3 acting through the sign of the permutation."""
    signs = [1, -1, -1, 1, 1, -1]
    return GModule(s3, CoefficientGroup.free(), np.array(signs).reshape(6, 1, 1))
