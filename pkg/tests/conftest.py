import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parents[1] / "scripts"))


def rationals(min_value=Fraction(1, 1000), max_value=Fraction(10**6), max_denominator=1000):
    return st.fractions(min_value=min_value, max_value=max_value, max_denominator=max_denominator)


positive = rationals()
alphas = rationals(Fraction(1, 1000), Fraction(5), 1000)
unit_open = rationals(Fraction(1, 1000), Fraction(999, 1000), 1000)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for outcome in acceptance.RESULTS:
        terminalreporter.write_line(outcome.line())
    for line in acceptance.INFO:
        terminalreporter.write_line(f"[INFO] {line}")
