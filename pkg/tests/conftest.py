"""Shared fixtures: one midsize generated world reused across test modules."""

import pytest

from socialbench.datagen import (
    GenConfig,
    cutoff_instant,
    generate_temporal_graph,
    split_at_cutoff,
)


@pytest.fixture(scope="session")
def gen_config():
    return GenConfig(seed=20260819, num_persons=500)


@pytest.fixture(scope="session")
def graph(gen_config):
    return generate_temporal_graph(gen_config)


@pytest.fixture(scope="session")
def sas(graph, gen_config):
    return split_at_cutoff(graph, gen_config)


@pytest.fixture(scope="session")
def cutoff(gen_config):
    return cutoff_instant(gen_config)
