from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gaudin_oper.gaudin import GaudinProblem
from gaudin_oper.ratfun import RationalFunction
from gaudin_oper.liealg import Weight, type_a_data
from gaudin_oper.repmod import irreducible_rep, tensor_rep

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_problem(rank, z, weights, lam_inf=None):
    rd = type_a_data(rank)
    return GaudinProblem(rd, tuple(z), tuple(Weight(w) for w in weights), Weight(lam_inf) if lam_inf else None)


def make_tensor(p):
    return tensor_rep([irreducible_rep(p.rd, lam) for lam in p.weights])


coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
loc = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def ratfuns(draw, max_poles=4, max_order=2, max_deg=2):
    locs = draw(st.lists(loc, max_size=max_poles, unique=True))
    poles = {x: draw(st.lists(coef, min_size=1, max_size=max_order)) for x in locs}
    poly = draw(st.lists(coef, max_size=max_deg + 1))
    return RationalFunction(poles, poly, field="Q")


@pytest.fixture
def two_site():
    """A1, V_1 (x) V_1 at z = (0, 1)."""
    p = make_problem(1, (0, 1), [[1], [1]])
    return p, make_tensor(p)


@pytest.fixture
def three_site():
    """A1, V_1^(x3) at z = (0, 1, 2)."""
    p = make_problem(1, (0, 1, 2), [[1], [1], [1]])
    return p, make_tensor(p)


@pytest.fixture
def a2_pair():
    """A2, V_w1 (x) V_w2 at z = (0, 1)."""
    p = make_problem(2, (0, 1), [[1, 0], [0, 1]])
    return p, make_tensor(p)


half = Fraction(1, 2)


# -- acceptance summary --------------------------------------------------------

_acceptance: dict[str, tuple[str, str]] = {}


def _criterion(nodeid: str):
    name = nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in nodeid or not name.startswith("test_ac"):
        return None
    num, _, title = name[len("test_ac") :].partition("_")
    return f"AC-{int(num)}", title.replace("_", " ")


def pytest_runtest_logreport(report):
    crit = _criterion(report.nodeid)
    if crit is None:
        return
    key, title = crit
    if report.failed:
        _acceptance[key] = ("FAIL", title)
    elif report.when == "call" and key not in _acceptance:
        _acceptance[key] = ("PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k.split("-")[1])):
        status, title = _acceptance[key]
        terminalreporter.write_line(f"{key:<6} {status}  {title}")
