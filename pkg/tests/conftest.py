import itertools
import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=150,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@st.composite
def alphabets(draw, max_k=4):
    from graphgroup.word import Alphabet

    k = draw(st.integers(1, max_k))
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    chosen = [p for p in pairs if draw(st.booleans())]
    return Alphabet(k, chosen)


def words(alphabet, max_len=8):
    syms = alphabet.symbols()
    return st.lists(st.sampled_from(syms), max_size=max_len).map(tuple)


def reduced(alphabet, max_len=8):
    return words(alphabet, max_len).map(alphabet.reduce)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in module.REPORT:
            terminalreporter.write_line(line)
