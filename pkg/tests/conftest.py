import numpy as np
import pytest

from ecoepi.model import Coefficients
from ecoepi.periodic import Constant, Harmonic
from ecoepi.scenario import load_config

PI = np.pi


def benchmark_params(gamma: float) -> Coefficients:
    return Coefficients(
        Lambda=Harmonic(0.7, 0.9, PI), beta=Harmonic(gamma, 0.7, 0.0),
        mu=Harmonic(0.6, 0.9, 0.0), c=Constant(0.1), eta=Harmonic(0.7, 0.7, PI),
        k=Constant(0.9), r=Harmonic(0.2, 0.7, 0.0), b=Harmonic(0.3, 0.7, PI),
    )


def constant_params(Lambda=1.0, beta=0.4, mu=0.5, c=0.1, eta=0.2, k=0.5, r=0.3, b=0.6,
                    period=1.0) -> Coefficients:
    return Coefficients(*(Constant(v, period) for v in (Lambda, beta, mu, c, eta, k, r, b)))


def random_constant_params(rng, min_R=1.05) -> Coefficients:
    """Constant coefficients with the threshold above ``min_R``."""
    lo = [0.5, 0.2, 0.2, 0.05, 0.1, 0.1, 0.1, 0.2]
    hi = [2.0, 1.0, 2.0, 0.5, 1.0, 1.0, 1.0, 1.0]
    while True:
        L, mu, be, c, eta, k, r, b = rng.uniform(lo, hi)
        if be * (L / mu) / (c + eta * r / b) > min_R:
            return constant_params(L, be, mu, c, eta, k, r, b)


def random_harmonic_params(rng) -> Coefficients:
    """Harmonic coefficients satisfying the nonnegativity and positive-average conditions."""
    def h(lo, hi):
        return Harmonic(rng.uniform(lo, hi), rng.uniform(0.0, 0.9), rng.uniform(0, 2 * PI))
    # r may change sign: amplitude above 1 allowed
    r = Harmonic(rng.uniform(0.1, 0.5), rng.uniform(0.0, 1.5), rng.uniform(0, 2 * PI))
    return Coefficients(Lambda=h(0.3, 1.5), beta=h(0.2, 1.5), mu=h(0.2, 1.0), c=h(0.05, 0.5),
                        eta=h(0.1, 1.0), k=h(0.1, 1.0), r=r, b=h(0.1, 1.0))


@pytest.fixture(scope="session")
def p045():
    return benchmark_params(0.45)


@pytest.fixture(scope="session")
def p060():
    return benchmark_params(0.6)


@pytest.fixture(scope="session")
def cfg045():
    return load_config("paper_gamma045.cfg")


@pytest.fixture(scope="session")
def cfg060():
    return load_config("paper_gamma060.cfg")


@pytest.fixture(scope="session")
def endemic060(p060):
    from ecoepi.endemic import find_endemic_orbit
    return find_endemic_orbit(p060)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
