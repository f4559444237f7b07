import numpy as np
import pytest
from hypothesis import settings, strategies as st

from ccspectra import kernels
from ccspectra.datasets import random_complex

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    mod = kernels.backends()[request.param]
    for name in ("signed_gram", "comember_laplacian", "pair_energy", "iso_search"):
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


@st.composite
def complexes(draw, max_vertices=8, max_rank=4, max_cell_size=4, features=0):
    n = draw(st.integers(1, max_vertices))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_complex(seed, n, max_rank=max_rank, max_cell_size=max_cell_size, with_features=features)


def perm_matrix(p):
    return p.matrix()


def edge_laplacian():
    return np.array([[1.0, -1.0], [-1.0, 1.0]])
