import math

import numpy as np
import pytest

from berger_helix.presets import preset_config

# (preset, lambda) pairs covering every surface the figures show
PRESET_VARIANTS = [
    ("fig1", -1),
    ("fig1", 1),
    ("fig2", 1),
    ("fig2", -1),
    ("fig3", -1),
    ("fig3bis", 1),
]


def variant_id(v):
    return f"{v[0]}{'+' if v[1] > 0 else '-'}"


@pytest.fixture(scope="session")
def preset_cache():
    cache = {}

    def get(name, lam=None):
        key = (name, lam)
        if key not in cache:
            cfg = preset_config(name, lam)
            cache[key] = (cfg, cfg.spec(), cfg.grid())
        return cache[key]

    return get


@pytest.fixture(params=PRESET_VARIANTS, ids=variant_id)
def preset(request, preset_cache):
    return preset_cache(*request.param)


def random_uv(grid, n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(*grid.u_range, n), rng.uniform(*grid.v_range, n)


def tensor_grid(grid, n=64, m=64):
    u = np.linspace(*grid.u_range, n)
    v = np.linspace(*grid.v_range, m)
    return np.meshgrid(u, v, indexing="ij")


SQRT2 = math.sqrt(2.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
