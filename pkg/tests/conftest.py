import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from xrfbench.dataset import dataset_from_arrays, load_dataset
from xrfbench.synthetic import crater_grid

TINY_CSV = "x,y,Fe,Si\n0,0,30,20\n1,0,10,40\n"


@pytest.fixture
def tiny_ds():
    return load_dataset(TINY_CSV, source_id="tiny")


@pytest.fixture
def quad_ds():
    """Four points in two tight pairs: ids {0,1} near x=0, {2,3} near x=10."""
    xyz = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    features = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    return dataset_from_arrays(xyz, features, ["A", "B"], source_id="quad")


@pytest.fixture(scope="session")
def crater():
    return crater_grid(seed=0)
