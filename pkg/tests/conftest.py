import functools

import pytest

from cellia import build_graph


@functools.lru_cache(maxsize=None)
def graph(r):
    return build_graph(r)


@pytest.fixture
def g():
    return graph
