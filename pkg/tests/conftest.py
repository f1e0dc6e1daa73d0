import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from daghilb.linalg import Morphism
from daghilb.scalars import FieldTag

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIELDS = [FieldTag.R, FieldTag.C, FieldTag.H]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=FIELDS, ids=lambda f: f.value)
def field(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


fields_st = st.sampled_from(FIELDS)


@st.composite
def morphisms(draw, field=None, rows=None, cols=None, max_dim=5):
    """Random matrices with bounded entries; shape drawn unless fixed."""
    f = draw(fields_st) if field is None else field
    r = draw(st.integers(0, max_dim)) if rows is None else rows
    c = draw(st.integers(0, max_dim)) if cols is None else cols
    seed = draw(st.integers(0, 2**32 - 1))
    return Morphism.random(f, r, c, np.random.default_rng(seed))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
