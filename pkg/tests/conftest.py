import math

import numpy as np
import pytest
from hypothesis import strategies as st

from rbmwedge import DEFAULT_ASYMMETRIC, DEFAULT_SYMMETRIC, ModelParams
from rbmwedge.estimate import PathEstimates
from rbmwedge.simulate import SimConfig, simulate_path
from rbmwedge.symmetric import remarkable_params

# ---------------------------------------------------------------------------
# parameter strategies
# ---------------------------------------------------------------------------


@st.composite
def recurrent_params(draw):
    mu1 = -draw(st.floats(0.2, 3.0))
    mu2 = -draw(st.floats(0.2, 3.0))
    s1 = draw(st.floats(0.3, 3.0))
    s2 = draw(st.floats(0.3, 3.0))
    rho = draw(st.floats(-0.9, 0.9)) * math.sqrt(s1 * s2)
    # recurrence: r1 > mu1 / mu2 and r2 > mu2 / mu1
    r1 = mu1 / mu2 + draw(st.floats(0.1, 3.0))
    r2 = mu2 / mu1 + draw(st.floats(0.1, 3.0))
    return ModelParams(mu1, mu2, s1, s2, rho, r1, r2)


@st.composite
def symmetric_params(draw):
    mu = -draw(st.floats(0.2, 3.0))
    sigma = draw(st.floats(0.3, 3.0))
    rho = draw(st.floats(-0.9, 0.9)) * sigma
    r = 1.0 + draw(st.floats(0.05, 4.0))
    return ModelParams.symmetric(mu, sigma, rho, r)


def random_recurrent(rng: np.random.Generator, n: int) -> list:
    out = []
    for _ in range(n):
        mu1, mu2 = -rng.uniform(0.2, 3.0, 2)
        s1, s2 = rng.uniform(0.3, 3.0, 2)
        rho = rng.uniform(-0.9, 0.9) * math.sqrt(s1 * s2)
        r1 = mu1 / mu2 + rng.uniform(0.1, 3.0)
        r2 = mu2 / mu1 + rng.uniform(0.1, 3.0)
        out.append(ModelParams(mu1, mu2, s1, s2, rho, r1, r2))
    return out


def random_symmetric(rng: np.random.Generator, n: int) -> list:
    return [ModelParams.symmetric(-rng.uniform(0.2, 3.0), s := rng.uniform(0.3, 3.0),
                                  rng.uniform(-0.9, 0.9) * s, 1.0 + rng.uniform(0.05, 4.0))
            for _ in range(n)]


# ---------------------------------------------------------------------------
# simulated paths, shared across the session
# ---------------------------------------------------------------------------

SHORT = SimConfig(horizon=2e3, burn_in=1e2, replicas=2, seed=11)


@pytest.fixture(scope="session")
def path_asym():
    return simulate_path(DEFAULT_ASYMMETRIC, SimConfig())


@pytest.fixture(scope="session")
def path_sym():
    return simulate_path(DEFAULT_SYMMETRIC, SimConfig())


@pytest.fixture(scope="session")
def path_rem():
    return simulate_path(remarkable_params(), SimConfig())


@pytest.fixture(scope="session")
def est_asym(path_asym):
    return PathEstimates(path_asym)


@pytest.fixture(scope="session")
def est_sym(path_sym):
    return PathEstimates(path_sym)


@pytest.fixture(scope="session")
def short_asym():
    return simulate_path(DEFAULT_ASYMMETRIC, SHORT)


@pytest.fixture(scope="session")
def short_sym():
    return simulate_path(DEFAULT_SYMMETRIC, SHORT)


# ---------------------------------------------------------------------------
# acceptance summary
# ---------------------------------------------------------------------------

_ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """``acceptance(n, ok, detail)`` records one criterion outcome."""
    def record(n: int, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE[n] = (bool(ok), detail)
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
