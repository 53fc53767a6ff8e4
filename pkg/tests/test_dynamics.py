"""RK4 flows and conservation drift."""

import io

import numpy as np
import pytest

from superint import catalog
from superint.catalog import bind, custom_system, parse_env
from superint.dynamics import (CSV_HEADER, IntegrationError, drift_report, explicit_drifts,
                               integrate, integrate_default, reversed_point)
from superint.phase import EUCLIDEAN, SPHERE, PhasePoint

E = parse_env("Euclidean")
EXPLICIT = ["E1", "E3", "E4", "E5", "E6", "E12", "E13", "E14", "E15", "E18", "S3", "S5", "S6"]


def test_free_flight():
    tr = integrate(custom_system("0"), PhasePoint(EUCLIDEAN, 0, 0, 1, 2), 1.0, 1e-3)
    assert abs(tr.end.q1 - 2) < 1e-12 and abs(tr.end.q2 - 4) < 1e-12


def test_e3_period():
    b = bind("E3", {"omega": 1})
    start = PhasePoint(EUCLIDEAN, 1, 0, 0, 1)
    tr = integrate(b, start, np.pi, 1e-3)
    assert np.abs(np.array(tr.end.as_tuple()) - np.array(start.as_tuple())).max() < 1e-6


def test_singular_start_rejected():
    with pytest.raises(IntegrationError, match="singular"):
        integrate(bind("E1"), PhasePoint(EUCLIDEAN, 0, 1, 0.5, 0.5), 1.0, 1e-3)


def test_blow_up_reports_last_time():
    b = custom_system("-x^4")
    with pytest.raises(IntegrationError) as err:
        integrate(b, PhasePoint(EUCLIDEAN, 1, 0, 1, 0), 10.0, 1e-3)
    assert 0 < err.value.t_last < 10


def test_step_validation():
    with pytest.raises(ValueError):
        integrate(bind("E3"), PhasePoint(EUCLIDEAN, 1, 0, 0, 1), 1.0, 0.0)


def test_times_uniform_and_increasing():
    tr = integrate(bind("E3"), PhasePoint(EUCLIDEAN, 1, 0, 0, 1), 1.0, 0.01)
    assert len(tr.times) == 101
    assert np.all(np.diff(tr.times) > 0)
    assert np.allclose(np.diff(tr.times), 0.01)


def test_e3_drift():
    b = bind("E3")
    tr = integrate_default(b, 10.0, 1e-3)
    drift = drift_report(tr, b, ["H", "A1", "A2", "X"])
    assert max(drift.values()) < 1e-8


def test_free_particle_drift():
    b = custom_system("0")
    tr = integrate(b, PhasePoint(EUCLIDEAN, 0.3, -0.2 + 0.1j, 1, 0.5j), 10.0, 1e-3)
    drift = drift_report(tr, b, ["H", E["px"], E["py"], E["M"]])
    assert max(drift.values()) < 1e-10


def test_s6_drift():
    b = bind("S6", {"alpha": 1})
    # angular momentum p_phi keeps the orbit away from the chart poles
    start = PhasePoint(SPHERE, 1.4, 0.3, 0.1, 0.8)
    tr = integrate(b, start, 5.0, 1e-3)
    drift = drift_report(tr, b, ["H", "A2", "A3", "X"])
    assert max(drift.values()) < 1e-7


def test_order_of_accuracy():
    # the E3 flow is linear, so the drift is dominated by the h^5 amplitude
    # error; dt = 1e-3 sits at roundoff, so the halving is measured at 0.04
    b = bind("E3")
    d = [max(drift_report(integrate_default(b, 10.0, dt), b, ["H", "A1", "A2", "X"]).values())
         for dt in (0.04, 0.02)]
    assert 8 <= d[0] / d[1] <= 32


@pytest.mark.parametrize("id_", EXPLICIT)
def test_explicit_constants_drift(id_):
    assert max(explicit_drifts(bind(id_)).values()) < 1e-6


def test_time_reversal():
    b = bind("E1")
    fwd = integrate_default(b, 3.0, 1e-3)
    back = integrate(b, reversed_point(fwd.end), 3.0, 1e-3)
    back_end = reversed_point(back.end)
    assert np.abs(np.array(back_end.as_tuple()) - np.array(fwd.start.as_tuple())).max() < 1e-7


def test_csv_dump():
    tr = integrate(bind("E3"), PhasePoint(EUCLIDEAN, 1, 0, 0, 1), 0.1, 0.01)
    text = tr.to_csv()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 12
    assert len(lines[1].split(",")) == 9
    buf = io.StringIO()
    tr.to_csv(buf)
    assert buf.getvalue() == text
