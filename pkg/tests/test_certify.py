import numpy as np

from eqfilter import certify


def test_all_suites_pass():
    checks = certify.run_all(seed=3)
    assert len(checks) == len(certify.SUITES)
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


def test_check_line_format():
    line = certify.Check("demo", 2e-13, 1e-12, 10).line()
    assert line.startswith("PASS") and "demo" in line and "n=10" in line
    assert certify.Check("demo", 1.0, 0.0, 1).line().startswith("FAIL")


def test_output_oracle_detects_wrong_matrix(monkeypatch):
    from eqfilter import filter as filt

    real = filt.output_matrix
    monkeypatch.setattr(certify, "output_matrix", lambda s, sys: 1.01 * real(s, sys))
    assert not certify.output_matrix_fd(np.random.default_rng(0), n=5).passed
