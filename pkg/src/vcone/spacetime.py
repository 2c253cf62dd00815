"""Events, v-cones and causal orderings in the privileged frame.

Space is 1-dimensional, c is normalized to 1, and influences propagate up to
a speed v = r*c with r > 1. The cone boundary is inclusive: |dx| = r*dt is
causally related. Comparisons run in exact rational arithmetic whenever all
coordinates are exact (int or Fraction, as produced by canonical_geometry);
otherwise in floats with tolerance 1e-12, since boundary cases are
semantically meaningful here.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError
from .patterns import parse_pattern, pattern_relations

FLOAT_TOL = 1e-12


class CausalRelation(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    UNRELATED = "unrelated"

    @property
    def symbol(self):
        return {"before": "<", "after": ">", "unrelated": "∼"}[self.value]


def _check_finite(v, what):
    if isinstance(v, numbers.Rational):
        return
    if not (isinstance(v, numbers.Real) and math.isfinite(v)):
        raise InvalidInputError(f"{what} must be a finite real, got {v!r}")


@dataclass(frozen=True)
class Event:
    label: str
    position: object    # real; Fraction coordinates stay exact
    time: object

    def __post_init__(self):
        _check_finite(self.position, f"position of {self.label!r}")
        _check_finite(self.time, f"time of {self.label!r}")


@dataclass(frozen=True)
class Geometry:
    events: tuple
    speed_ratio: object

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        _check_finite(self.speed_ratio, "speed_ratio")
        if not self.speed_ratio > 1:
            raise InvalidInputError(f"speed ratio must exceed 1, got {self.speed_ratio}")
        labels = [e.label for e in self.events]
        if len(set(labels)) != len(labels):
            raise InvalidInputError(f"duplicate event labels in {labels}")

    def event(self, label) -> Event:
        for e in self.events:
            if e.label == label:
                return e
        raise InvalidInputError(f"no event labeled {label!r}")

    @property
    def labels(self):
        return tuple(e.label for e in self.events)


def _all_exact(*vals):
    return all(isinstance(v, numbers.Rational) for v in vals)


def causal_relation(e1: Event, e2: Event, r) -> CausalRelation:
    """Before iff e2 is later and inside e1's future v-cone (boundary counts)."""
    _check_finite(r, "speed ratio r")
    if not r > 1:
        raise InvalidInputError(f"speed ratio must exceed 1, got {r}")
    x1, t1, x2, t2 = e1.position, e1.time, e2.position, e2.time
    if _all_exact(x1, t1, x2, t2, r):
        dt = Fraction(t2) - Fraction(t1)
        dx = abs(Fraction(x2) - Fraction(x1))
        rq = Fraction(r)
        if dt > 0 and dx <= rq * dt:
            return CausalRelation.BEFORE
        if dt < 0 and dx <= rq * (-dt):
            return CausalRelation.AFTER
        return CausalRelation.UNRELATED
    dt = float(t2) - float(t1)
    dx = abs(float(x2) - float(x1))
    if dt > FLOAT_TOL and dx <= float(r) * dt + FLOAT_TOL:
        return CausalRelation.BEFORE
    if dt < -FLOAT_TOL and dx <= float(r) * (-dt) + FLOAT_TOL:
        return CausalRelation.AFTER
    return CausalRelation.UNRELATED


def canonical_geometry(r) -> Geometry:
    """The four-site arrangement used by the signalling demonstration.

    A measures first at the origin; D sits at distance 1 exactly on A's
    v-cone boundary; B and C are measured simultaneously in between, placed
    so that both lie inside the v-cones of A and D but outside each other's:
    the ordering is A<D<(B~C) for every r > 1. All coordinates are rational
    in r and returned as exact Fractions.
    """
    _check_finite(r, "speed ratio r")
    if not r > 1:
        raise InvalidInputError(f"speed ratio must exceed 1, got {r}")
    rq = Fraction(r)
    t_bc = 2 / (1 + rq)
    d_b = (1 + 1 / rq) / 4 + 1 / (1 + rq)
    d_c = 3 * (1 + 1 / rq) / 4 - 1 / (1 + rq)
    return Geometry(
        events=(
            Event("A", Fraction(0), Fraction(0)),
            Event("B", d_b, t_bc),
            Event("C", d_c, t_bc),
            Event("D", Fraction(1), 1 / rq),
        ),
        speed_ratio=rq,
    )


def ordering(g: Geometry) -> dict:
    """Complete pairwise relation table, (label1, label2) -> CausalRelation."""
    table = {}
    for e1 in g.events:
        for e2 in g.events:
            if e1.label != e2.label:
                table[(e1.label, e2.label)] = causal_relation(e1, e2, g.speed_ratio)
    return table


def matches(g: Geometry, pattern: str) -> bool:
    """Whether g's ordering satisfies a pattern such as "A<D<(B~C)"."""
    wanted = pattern_relations(parse_pattern(pattern))
    table = ordering(g)
    for pair, rel in wanted.items():
        if pair not in table:
            raise InvalidInputError(f"pattern {pattern!r} names labels missing from geometry")
        if table[pair] != CausalRelation(rel):
            return False
    return True


def _meeting_point(events):
    """Earliest point covered by all the events' light-speed broadcasts.

    Each event's broadcast covers {(x,t): t >= t_i + |x - x_i|}. The covering
    time at x is the max of those cones; its minimum over x is attained
    either at a single latest event or where two cones cross, so the optimum
    is the best over singletons and pairs (exact, no search needed).
    """
    exact = _all_exact(*(v for e in events for v in (e.position, e.time)))
    conv = Fraction if exact else float
    pts = [(conv(e.position), conv(e.time)) for e in events]
    # candidates sit exactly on cone boundaries, so the float coverage test
    # needs slack against roundoff; the exact path needs none
    tol = 0 if exact else FLOAT_TOL * max(
        1.0, *(abs(v) for xy in pts for v in xy))
    best_t, best_x = None, None
    for i, (xi, ti) in enumerate(pts):
        # singleton: event i's own start, if every other cone already covers it
        if all(ti >= tj + abs(xi - xj) - tol
               for j, (xj, tj) in enumerate(pts) if j != i):
            if best_t is None or ti < best_t:
                best_t, best_x = ti, xi
        for xj, tj in pts[i + 1:]:
            if xi > xj:
                (xi2, ti2), (xj2, tj2) = (xj, tj), (xi, ti)
            else:
                (xi2, ti2), (xj2, tj2) = (xi, ti), (xj, tj)
            t = (ti2 + tj2 + (xj2 - xi2)) / 2
            x = (xi2 + xj2 + tj2 - ti2) / 2
            if t < max(ti2, tj2) - tol:   # one cone contains the other's apex
                continue
            if all(t >= tk + abs(x - xk) - tol for xk, tk in pts):
                if best_t is None or t < best_t:
                    best_t, best_x = t, x
    return best_x, best_t


def broadcast_meeting_events(g: Geometry):
    """(d_prime, a_prime): earliest events where the outcomes of {B,C,D} and
    {A,B,C} respectively are all co-available via light-speed broadcasts."""
    bcd = [g.event(l) for l in "BCD"]
    abc = [g.event(l) for l in "ABC"]
    xd, td = _meeting_point(bcd)
    xa, ta = _meeting_point(abc)
    return Event("D'", xd, td), Event("A'", xa, ta)


def effective_speed(source: Event, target: Event) -> float:
    """|dx|/dt from source to target, in units of c."""
    dt = target.time - source.time
    if not dt > 0:
        raise InvalidInputError(
            f"target must be strictly later than source (dt={dt})")
    return float(abs(target.position - source.position)) / float(dt)


def reflect_geometry(g: Geometry, center=0) -> Geometry:
    """Mirror all positions about a spatial point; preserves causal relations."""
    return Geometry(
        events=tuple(Event(e.label, 2 * center - e.position, e.time) for e in g.events),
        speed_ratio=g.speed_ratio,
    )


def _shifted(g: Geometry, shifts: dict) -> Geometry:
    return Geometry(
        events=tuple(
            Event(e.label, e.position, e.time + shifts.get(e.label, 0))
            for e in g.events),
        speed_ratio=g.speed_ratio,
    )


def randomized_schedule(g: Geometry, delta=None) -> list:
    """Three timing variants of g: B measured delta earlier and C delta later
    (realizing A<D<B<C), the reverse (A<D<C<B), and g unchanged (A<D<(B~C)).

    delta=0 returns three identical copies. A delta too small to pull B into
    C's past v-cone, or large enough to break A<D<B or A<D<C, is rejected;
    for the canonical geometry the two limits coincide, so the feasible delta
    is the single exact value (x_C - x_B)/(2r), used when delta is omitted.
    """
    if delta is None:
        xb, xc = g.event("B").position, g.event("C").position
        delta = (Fraction(xc) - Fraction(xb)) / (2 * Fraction(g.speed_ratio))
    _check_finite(delta, "delta")
    if delta < 0:
        raise InvalidInputError(f"delta must be >= 0, got {delta}")
    if isinstance(delta, float) and _all_exact(*(v for e in g.events
                                                 for v in (e.position, e.time))):
        delta = Fraction(delta)
    if delta == 0:
        return [g, g, g]
    b_first = _shifted(g, {"B": -delta, "C": +delta})
    c_first = _shifted(g, {"B": +delta, "C": -delta})
    for variant, pattern in ((b_first, "A<D<B<C"), (c_first, "A<D<C<B"),
                             (g, "A<D<(B~C)")):
        if not matches(variant, pattern):
            raise InvalidInputError(
                f"delta={delta} does not realize {pattern}; "
                f"shift too small to order B and C, or large enough to break A<D")
    return [b_first, c_first, g]


# ---------------------------------------------------------------------------
# JSON format: {speed_ratio, events: [{label, position, time}]}

def geometry_to_json(g: Geometry) -> dict:
    return {
        "speed_ratio": float(g.speed_ratio),
        "events": [
            {"label": e.label, "position": float(e.position), "time": float(e.time)}
            for e in g.events
        ],
    }


def geometry_from_json(d: dict) -> Geometry:
    return Geometry(
        events=tuple(Event(e["label"], float(e["position"]), float(e["time"]))
                     for e in d["events"]),
        speed_ratio=float(d["speed_ratio"]),
    )
