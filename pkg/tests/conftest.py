import numpy as np
import pytest

from fdpkit import EXAMPLE1_PVALUES


@pytest.fixture
def example1():
    """The 15 p-values used across the worked examples."""
    return np.asarray(EXAMPLE1_PVALUES, dtype=float)
