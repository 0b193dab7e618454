"""Acceptance criteria A1-A9 at their stated tolerances.

Each test records one verdict line per criterion plus its measured sub-checks;
conftest prints them in the terminal summary whether or not they pass.
"""

import pytest

from smt_ellipse import validation as v


@pytest.fixture(scope="module")
def e1():
    return v.run_e1()


def _judge(record, label, checks):
    ok = all(c.passed for c in checks)
    line = f"{label} {'PASS' if ok else 'FAIL'}"
    print(line)
    record(line)
    for c in checks:
        print("    " + c.line())
        record("    " + c.line())
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)


def test_A1_mathieu_core(record_acceptance):
    _judge(record_acceptance, "A1", v.check_mathieu())


def test_A2_expansion(record_acceptance):
    _judge(record_acceptance, "A2", v.check_expansion())


def test_A3_forward_model(record_acceptance):
    _judge(record_acceptance, "A3", v.check_forward())


def test_A4_hankel_pair(record_acceptance):
    _judge(record_acceptance, "A4", v.check_hankel())


def test_A5_identities(record_acceptance):
    _judge(record_acceptance, "A5", v.check_identities())


def test_A6_end_to_end(record_acceptance, e1):
    _judge(record_acceptance, "A6", v.check_e1(e1))


def test_A7_norton_baseline(record_acceptance, e1):
    _judge(record_acceptance, "A7", v.check_norton(e1))


def test_A8_linearity_symmetry(record_acceptance, e1):
    _judge(record_acceptance, "A8", v.check_linearity_symmetry(e1.cache))


def test_A9_refinement(record_acceptance, e1):
    _judge(record_acceptance, "A9", v.check_refinement(e1))
