import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from degone.qfield import make_field

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.register_profile("ci", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CORPUS = ["x^2-x-1", "x^2+1", "x^2-2", "x^3-2", "x^3-x-1"]

_FIELDS = {}


def field(poly):
    """Fields are cached across the session; they are immutable apart from caches."""
    if poly not in _FIELDS:
        _FIELDS[poly] = make_field(poly)
    return _FIELDS[poly]


@pytest.fixture(scope="session")
def Qphi():
    return field("x^2-x-1")


@pytest.fixture(scope="session")
def Qi():
    return field("x^2+1")


@pytest.fixture(scope="session")
def QQ():
    return field("x")


@pytest.fixture(scope="session")
def Qcbrt2():
    return field("x^3-2")


@pytest.fixture(params=CORPUS, scope="session")
def corpus_field(request):
    return field(request.param)


def rationals(num=12, den=4):
    return st.builds(Fraction, st.integers(-num, num), st.integers(1, den))


def elements(K, num=12, den=4, nonzero=False):
    s = st.lists(rationals(num, den), min_size=K.degree, max_size=K.degree).map(K)
    if nonzero:
        s = s.filter(lambda a: not a.is_zero())
    return s


def random_elements(K, count, seed=0, num=20, den=6):
    """Deterministic sample of nonzero elements."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a = K([Fraction(rng.randint(-num, num), rng.randint(1, den)) for _ in range(K.degree)])
        if not a.is_zero():
            out.append(a)
    return out


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        verdict, text = mod.RESULTS[n]
        terminalreporter.write_line(f"[{verdict}] criterion {n}: {text}")
