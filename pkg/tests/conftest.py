import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from satplateau.golden import golden_formula, golden_formula_printed


@pytest.fixture(scope="session")
def golden():
    return golden_formula()


@pytest.fixture(scope="session")
def golden_printed():
    return golden_formula_printed()
