"""Fixed-step RK4 integration of the complexified Hamiltonian flow.

Coordinates are complex and time is real: q' = dH/dp, p' = -dH/dq for the
holomorphic H.  Sphere systems stay in the (theta, phi) chart and abort
near the poles.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .catalog import SPHERE_SPACE, BoundSystem
from .phase import (EXCLUSION_RADIUS, Chart, Observable, PhasePoint, compile_observables,
                    diff, sample_points, sin, sqrt_arguments, var)

BLOWUP = 1e6
CSV_HEADER = ("t", "q1_re", "q1_im", "q2_re", "q2_im", "p1_re", "p1_im", "p2_re", "p2_im")


class IntegrationError(RuntimeError):
    """The flow left the safe domain; ``t_last`` is the last valid time."""

    def __init__(self, message: str, t_last: float):
        super().__init__(f"{message} (last valid t = {t_last:.6g})")
        self.t_last = t_last


@dataclass(frozen=True)
class Trajectory:
    chart: Chart
    times: np.ndarray  # (n,) real, uniform
    states: np.ndarray  # (n, 4) complex
    system_id: str
    params: dict

    def point(self, k: int) -> PhasePoint:
        return PhasePoint(self.chart, *self.states[k])

    @property
    def start(self) -> PhasePoint:
        return self.point(0)

    @property
    def end(self) -> PhasePoint:
        return self.point(-1)

    def to_csv(self, stream=None) -> str | None:
        out = stream or io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, s in zip(self.times, self.states):
            w.writerow([repr(float(t))] + [repr(float(x)) for z in s for x in (z.real, z.imag)])
        return out.getvalue() if stream is None else None


class _Flow:
    def __init__(self, system: BoundSystem):
        h = system.hamiltonian
        q1, q2, p1, p2 = system.chart.names
        params = system.numeric_params
        # (q1', q2', p1', p2') = (dH/dp1, dH/dp2, -dH/dq1, -dH/dq2)
        self.field = compile_observables([diff(h, p1), diff(h, p2), diff(h, q1), diff(h, q2)],
                                         system.chart, params)
        guards = list(system.singular_set())
        if system.space == SPHERE_SPACE:
            guards.append(sin(var(q1)))
        self.guards = compile_observables(guards, system.chart, params) if guards else None
        roots = sqrt_arguments(system.potential)
        self.roots = compile_observables(roots, system.chart, params) if roots else None

    def rhs(self, y: np.ndarray) -> np.ndarray:
        a, b, c, d = self.field(*y)
        return np.array([a, b, -c, -d])

    def check(self, y: np.ndarray, t: float, radius: float) -> None:
        if not np.all(np.isfinite(y)) or np.abs(y).max() > BLOWUP:
            raise IntegrationError("blow-up: a coordinate exceeded 1e6", t)
        if self.guards is not None:
            vals = self.guards(*y)
            if min(abs(v) for v in vals) < radius:
                raise IntegrationError("approached a singular locus of the potential or the chart poles", t)

    def branch(self, y: np.ndarray) -> tuple | None:
        return None if self.roots is None else self.roots(*y)


def _crossed_cut(before: tuple | None, after: tuple | None) -> bool:
    if before is None:
        return False
    return any((a.real < 0 or b.real < 0) and (a.imag >= 0) != (b.imag >= 0)
               for a, b in zip(before, after))


def integrate(system: BoundSystem, start: PhasePoint | Sequence[complex], t_end: float,
              dt: float) -> Trajectory:
    """Classical RK4 with fixed step ``dt`` from ``start`` to ``t_end``.

    Aborts on blow-up, on approaching a divisor of the potential (or the
    sphere poles) and on a square-root argument crossing its branch cut.
    H is even in the momenta, so the backward flow is the forward flow from
    the momentum-reversed point (see ``reversed_point``).
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    flow = _Flow(system)
    y = np.array(start.as_tuple() if isinstance(start, PhasePoint) else start, complex)
    try:
        flow.check(y, 0.0, EXCLUSION_RADIUS)
    except (ZeroDivisionError, ValueError, OverflowError):
        raise IntegrationError("singular start", 0.0) from None
    n = max(1, int(round(t_end / dt)))
    h = t_end / n
    states = np.empty((n + 1, 4), complex)
    states[0] = y
    cut = flow.branch(y)
    f = flow.rhs
    for k in range(n):
        t = k * h
        try:
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            flow.check(y, t, EXCLUSION_RADIUS)
            now = flow.branch(y)
        except (ZeroDivisionError, ValueError, OverflowError):
            raise IntegrationError("singular evaluation", t) from None
        if _crossed_cut(cut, now):
            raise IntegrationError("a square-root argument crossed its branch cut", t)
        cut = now
        states[k + 1] = y
    times = np.arange(n + 1) * h
    return Trajectory(system.chart, times, states, system.id, dict(system.numeric_params))


def reversed_point(pt: PhasePoint) -> PhasePoint:
    """(q, p) -> (q, -p): the start of the time-reversed flow."""
    return pt.with_momenta(-pt.p1, -pt.p2)


def default_start(system: BoundSystem, seed: int = 0, k: int = 0) -> PhasePoint:
    """The ``k``-th seeded real start avoiding the system's singular set."""
    excl = list(system.singular_set())
    return sample_points(system.chart, seed, k + 1, excl, system.numeric_params,
                         box=1.0, real=True)[k]


def integrate_default(system: BoundSystem, t_end: float = 10.0, dt: float = 1e-3,
                      seed: int = 0, attempts: int = 20) -> Trajectory:
    """Integrate from the first seeded start whose trajectory stays in the domain."""
    last = None
    starts = sample_points(system.chart, seed, attempts, list(system.singular_set()),
                           system.numeric_params, box=1.0, real=True)
    for s in starts:
        try:
            return integrate(system, s, t_end, dt)
        except IntegrationError as err:
            last = err
    raise IntegrationError(f"{system.id}: no seeded start survived: {last}",
                           getattr(last, "t_last", 0.0))


def _observables(system: BoundSystem, constants: Iterable[str | Observable]) -> list[tuple[str, Observable]]:
    out = []
    for c in constants:
        if isinstance(c, Observable):
            out.append((repr(c), c))
        elif c == "H":
            out.append(("H", system.hamiltonian))
        else:
            out.append((c, system.observable(c)))
    return out


def drift_report(traj: Trajectory, system: BoundSystem,
                 constants: Iterable[str | Observable]) -> dict[str, float]:
    """max_t |A(t) - A(0)| / (1 + |A(0)|) for each constant (H, catalog names or observables)."""
    named = _observables(system, constants)
    fns = compile_observables([o for _, o in named], traj.chart, system.numeric_params)
    vals = np.array([fns(*s) for s in traj.states])
    a0 = vals[0]
    drift = np.abs(vals - a0).max(axis=0) / (1 + np.abs(a0))
    return {name: float(d) for (name, _), d in zip(named, drift)}


def explicit_drifts(system: BoundSystem, t_end: float = 10.0, dt: float = 1e-3,
                    seed: int = 0) -> dict[str, float]:
    """Drift of every explicit constant along the seeded default trajectory."""
    traj = integrate_default(system, t_end, dt, seed)
    return drift_report(traj, system, system.explicit_constants())


__all__ = ["Trajectory", "IntegrationError", "integrate", "integrate_default", "default_start", "reversed_point",
           "drift_report", "explicit_drifts", "CSV_HEADER"]
