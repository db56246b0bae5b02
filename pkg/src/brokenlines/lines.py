"""Broken traces and lines, and the brick-diagram decomposition.

A broken trace walks upward in x with t-steps of +-1.  Every flow field on a
rectangle splits uniquely into an ordered family of weighted traces that
cross the domain; the splitting is read off the brick diagram, a cumulative
height function on the odd half-lattice whose vertical strips are exactly
the maximal crossing lines.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .flow import (
    ABS_TOL,
    BirthField,
    BoundaryFlow,
    FlowField,
    field_from_birth,
    require_conserved,
)
from .lattice import Domain, Edge, RectDomain, Site, edge_between, midpoints

# Height assignments reached along different search paths may disagree by
# accumulated rounding; anything beyond this is a conservation violation.
REL_SLACK = 1e-9


class Order(Enum):
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class BrokenTrace:
    """Sites ``y_0 .. y_n`` with ``x`` increasing by one and ``t`` by +-1."""

    sites: tuple[Site, ...]

    def __post_init__(self) -> None:
        if len(self.sites) < 2:
            raise ValueError("a trace needs at least two sites")
        for (t0, x0), (t1, x1) in zip(self.sites, self.sites[1:]):
            if x1 != x0 + 1 or abs(t1 - t0) != 1:
                raise ValueError(f"illegal step {(t0, x0)} -> {(t1, x1)}")
        if (self.sites[0][0] + self.sites[0][1]) % 2 != 0:
            raise ValueError("trace leaves the even sublattice")

    @cached_property
    def _t_by_x(self) -> dict[int, int]:
        return {x: t for (t, x) in self.sites}

    @property
    def x_low(self) -> int:
        return self.sites[0][1]

    @property
    def x_high(self) -> int:
        return self.sites[-1][1]

    def t_at(self, x: int) -> int:
        return self._t_by_x[x]

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(edge_between(a, b) for a, b in zip(self.sites, self.sites[1:]))

    @cached_property
    def left_corners(self) -> tuple[Site, ...]:
        """Sites where the trace turns at a local t-minimum; births live here."""
        out = []
        for prev, cur, nxt in zip(self.sites, self.sites[1:], self.sites[2:]):
            if prev[0] == cur[0] + 1 and nxt[0] == cur[0] + 1:
                out.append(cur)
        return tuple(out)

    def t_span(self) -> tuple[int, int]:
        ts = [t for (t, _) in self.sites]
        return min(ts), max(ts)

    def is_subtrace_of(self, other: "BrokenTrace") -> bool:
        if self.x_low < other.x_low or self.x_high > other.x_high:
            return False
        return all(other.t_at(x) == t for (t, x) in self.sites)


def trace_in_closure(domain: Domain, trace: BrokenTrace) -> bool:
    """True when every trace edge touches the domain."""
    return all(e in domain.edge_set for e in trace.edges)


def trace_crosses(domain: Domain, trace: BrokenTrace) -> bool:
    """True when the trace spans the domain: outer endpoints, inner body."""
    first, last = trace.sites[0], trace.sites[-1]
    if domain.contains(first) or domain.contains(last):
        return False
    if not (domain.in_closure(first) and domain.in_closure(last)):
        return False
    return all(domain.contains(y) for y in trace.sites[1:-1])


def compare_traces(a: BrokenTrace, b: BrokenTrace) -> Order:
    """Left/right order of two traces.

    ``a`` is right of ``b`` when it is nowhere earlier on shared heights and
    somewhere not earlier overall (the second clause decides disjoint
    domains).  Traces dominating each other both ways are reported EQUAL;
    on crossing traces that happens only for identical ones.
    """
    a_right = _dominates(a, b)
    b_right = _dominates(b, a)
    if a_right and b_right:
        return Order.EQUAL
    if a_right:
        return Order.RIGHT_OF
    if b_right:
        return Order.LEFT_OF
    return Order.INCOMPARABLE


def _dominates(a: BrokenTrace, b: BrokenTrace) -> bool:
    lo = max(a.x_low, b.x_low)
    hi = min(a.x_high, b.x_high)
    if lo <= hi:
        return all(a.t_at(x) >= b.t_at(x) for x in range(lo, hi + 1))
    return a.t_span()[1] >= b.t_span()[0]


@dataclass(frozen=True)
class BrokenLine:
    """A trace carrying one half-open mass interval per edge.

    All intervals share a common width, the weight; the empty line has no
    intervals and weight zero.
    """

    trace: BrokenTrace
    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if self.intervals:
            if len(self.intervals) != len(self.trace.edges):
                raise ValueError("need one interval per edge")
            widths = [b - a for a, b in self.intervals]
            spread = max(widths) - min(widths)
            if spread > REL_SLACK * max(1.0, float(max(widths))):
                raise ValueError(f"interval widths differ by {spread}")

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def weight(self):
        if not self.intervals:
            return 0
        a, b = self.intervals[0]
        return b - a


@dataclass(frozen=True)
class Decomposition:
    """Crossing traces ordered left to right with their positive weights."""

    entries: tuple[tuple[BrokenTrace, float], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def traces(self) -> tuple[BrokenTrace, ...]:
        return tuple(t for t, _ in self.entries)

    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.entries)

    def total_weight(self):
        return sum(self.weights())


@dataclass(frozen=True)
class BrickDiagram:
    """Cumulative-coordinate view of a flow field on a rectangle.

    ``heights`` assigns every odd midpoint its cumulative coordinate; sorted
    distinct values form ``breakpoints``.  Per closure site, ``strip_lo`` and
    ``strip_hi`` bound the strip indices whose vertical band passes through
    that site's brick.
    """

    domain: RectDomain
    mode: str
    breakpoints: tuple[float, ...]
    heights: dict[Site, float]
    strip_lo: dict[Site, int]
    strip_hi: dict[Site, int]

    @property
    def strip_count(self) -> int:
        return len(self.breakpoints) - 1

    def strip_weight(self, j: int):
        return self.breakpoints[j] - self.breakpoints[j - 1]

    def edge_range(self, e: Edge) -> tuple[int, int]:
        lo = max(self.strip_lo[e.base], self.strip_lo[e.head])
        hi = min(self.strip_hi[e.base], self.strip_hi[e.head])
        return lo, hi

    def trace_range(self, trace: BrokenTrace) -> tuple[int, int]:
        try:
            lo = max(self.strip_lo[y] for y in trace.sites)
            hi = min(self.strip_hi[y] for y in trace.sites)
        except KeyError as err:
            raise ValueError(f"trace leaves the domain closure at {err.args[0]}") from None
        return lo, hi

    def weight_of(self, trace: BrokenTrace):
        lo, hi = self.trace_range(trace)
        if hi <= lo:
            return 0 if self.mode == "int" else 0.0
        return self.breakpoints[hi] - self.breakpoints[lo]

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "mode": self.mode,
            "breakpoints": list(self.breakpoints),
            "heights": [
                {"t": t, "x": x, "p": self.heights[(t, x)]}
                for (t, x) in sorted(self.heights)
            ],
        }


# Midpoint steps: moving east across an edge raises the height by its mass.
# For a midpoint (u, v) the four adjacent crossings are fixed edge ids.
def _midpoint_links(u: int, v: int):
    return (
        ((u + 1, v + 1), Edge(u, v + 1, False), +1),
        ((u + 1, v - 1), Edge(u, v - 1, True), +1),
        ((u - 1, v - 1), Edge(u - 1, v, False), -1),
        ((u - 1, v + 1), Edge(u - 1, v, True), -1),
    )


def brick_diagram(field: FlowField) -> BrickDiagram:
    """Build the cumulative diagram of a conserved field on a rectangle.

    Heights spread by breadth-first search from the midpoint west of the
    west corner, which anchors the minimum at zero; conservation makes the
    assignment path-independent.
    """
    domain = field.domain
    if not isinstance(domain, RectDomain):
        raise ValueError("the brick diagram is defined on rectangular domains only")
    require_conserved(field)
    mass = field.mass
    is_int = field.mode == "int"

    anchor: Site = (-1, 0)
    heights: dict[Site, float] = {anchor: 0 if is_int else 0.0}
    queue = deque([anchor])
    slack = 0 if is_int else REL_SLACK * max(1, field.max_mass) * len(mass)
    while queue:
        u, v = queue.popleft()
        h = heights[(u, v)]
        for other, edge, sign in _midpoint_links(u, v):
            if edge not in mass:
                continue
            value = h + sign * mass[edge]
            if other in heights:
                if abs(heights[other] - value) > slack:
                    raise ValueError(f"inconsistent heights at midpoint {other}")
                continue
            heights[other] = value
            queue.append(other)

    expected = midpoints(domain)
    if len(heights) != len(expected):
        missing = set(expected) - set(heights)
        raise ValueError(f"unreached midpoints: {sorted(missing)[:4]}")

    # Deduplicate heights into strictly increasing breakpoints.
    eps = 0 if is_int else ABS_TOL * max(1.0, float(max(heights.values())))
    values = sorted(heights.values())
    breakpoints = [values[0]]
    for v in values[1:]:
        if v - breakpoints[-1] > eps:
            breakpoints.append(v)

    def index_of(value) -> int:
        return bisect_right(breakpoints, value) - 1

    # Strip bounds per closure site.  Inner sites read the midpoints to
    # their west and east; outer sites read the one midpoint that their
    # single entering or exiting edge touches.
    strip_lo: dict[Site, int] = {}
    strip_hi: dict[Site, int] = {}
    contains = domain.contains
    for y in domain.closure:
        t, x = y
        if contains(y):
            lo_mid, hi_mid = (t - 1, x), (t + 1, x)
        elif contains((t + 1, x - 1)):  # outer northwest
            lo_mid, hi_mid = (t, x - 1), (t + 1, x)
        elif contains((t + 1, x + 1)):  # outer southwest
            lo_mid, hi_mid = (t, x + 1), (t + 1, x)
        elif contains((t - 1, x - 1)):  # outer northeast
            lo_mid, hi_mid = (t - 1, x), (t, x - 1)
        else:  # outer southeast
            lo_mid, hi_mid = (t - 1, x), (t, x + 1)
        strip_lo[y] = index_of(heights[lo_mid])
        strip_hi[y] = index_of(heights[hi_mid])

    return BrickDiagram(domain, field.mode, tuple(breakpoints), heights, strip_lo, strip_hi)


def decompose(field: FlowField) -> Decomposition:
    """Split a field into its ordered family of weighted crossing traces."""
    diagram = brick_diagram(field)
    strips: dict[int, list[Site]] = {j: [] for j in range(1, diagram.strip_count + 1)}
    for y in field.domain.closure:
        lo, hi = diagram.strip_lo[y], diagram.strip_hi[y]
        for j in range(lo + 1, hi + 1):
            strips[j].append(y)
    entries = []
    for j in range(1, diagram.strip_count + 1):
        sites = sorted(strips[j], key=lambda y: y[1])
        trace = BrokenTrace(tuple(sites))
        entries.append((trace, diagram.strip_weight(j)))
    return Decomposition(tuple(entries))


def compose(
    domain: RectDomain,
    decomposition: Decomposition,
    mode: str | None = None,
) -> FlowField:
    """The unique field whose crossing traces are exactly the given ones.

    Built as the edgewise sum of ``weight * indicator(trace)``; the input
    must be strictly ordered left to right with positive weights.
    """
    if not isinstance(domain, RectDomain):
        raise ValueError("composition is defined on rectangular domains only")
    traces = decomposition.traces()
    weights = decomposition.weights()
    for w in weights:
        if not w > 0:
            raise ValueError(f"weights must be positive, got {w!r}")
    for trace in traces:
        if not trace_crosses(domain, trace):
            raise ValueError(f"trace does not cross the domain: {trace.sites}")
    for a, b in zip(traces, traces[1:]):
        if compare_traces(a, b) is not Order.LEFT_OF:
            raise ValueError("traces are not strictly ordered left to right")

    if mode is None:
        mode = "int" if all(isinstance(w, int) for w in weights) else "float"
    zero = 0 if mode == "int" else 0.0
    mass = {e: zero for e in domain.edges}
    for trace, w in decomposition:
        for e in trace.edges:
            mass[e] += w
    return FlowField(domain, mass, mode)


def trace_weight(field: FlowField, trace: BrokenTrace):
    """Weight of the maximal line with the given trace: its strips' total width."""
    return brick_diagram(field).weight_of(trace)


def maximal_line(field: FlowField, trace: BrokenTrace) -> BrokenLine:
    """The widest line on ``trace`` compatible with the field.

    The common strip range of all trace sites is translated back onto each
    edge's own (0, mass] scale; an empty range yields the empty line.
    """
    diagram = brick_diagram(field)
    lo, hi = diagram.trace_range(trace)
    if hi <= lo:
        return BrokenLine(trace, ())
    q = diagram.breakpoints
    width = q[hi] - q[lo]
    intervals = []
    for e in trace.edges:
        start = q[lo] - q[diagram.edge_range(e)[0]]
        intervals.append((start, start + width))
    return BrokenLine(trace, tuple(intervals))


def line_fields(
    domain: RectDomain,
    trace: BrokenTrace,
    weight,
) -> tuple[BirthField, BoundaryFlow, FlowField]:
    """Birth, boundary and flow fields of one weighted trace.

    Births sit on the left corners; boundary inflow appears when an end
    segment enters the domain from the west sides.  For a crossing trace the
    flow field equals the forward construction run on these data.
    """
    if weight < 0:
        raise ValueError("weight must be nonnegative")
    if not trace_in_closure(domain, trace):
        raise ValueError("trace leaves the domain closure")
    mode = "int" if isinstance(weight, int) else "float"
    zero = 0 if mode == "int" else 0.0

    births = {y: weight for y in trace.left_corners if weight != 0}
    up_in: dict[Site, float] = {}
    down_in: dict[Site, float] = {}
    first, second = trace.sites[0], trace.sites[1]
    if not domain.contains(first) and second == (first[0] + 1, first[1] + 1):
        if weight != 0:
            up_in[second] = weight
    last, before = trace.sites[-1], trace.sites[-2]
    if not domain.contains(last) and last == (before[0] - 1, before[1] + 1):
        if weight != 0:
            down_in[before] = weight

    mass = {e: zero for e in domain.edges}
    if weight != 0:
        for e in trace.edges:
            mass[e] = weight
    return (
        BirthField(domain, births),
        BoundaryFlow(up_in, down_in),
        FlowField(domain, mass, mode),
    )


def field_of_line(domain: RectDomain, trace: BrokenTrace, weight) -> FlowField:
    births, boundary, _ = line_fields(domain, trace, weight)
    return field_from_birth(domain, boundary, births)


def decomposition_to_csv_rows(dec: Decomposition) -> list[list]:
    rows = [["j", "weight", "sites"]]
    for j, (trace, w) in enumerate(dec, start=1):
        rows.append([j, w, " ".join(f"{t}:{x}" for (t, x) in trace.sites)])
    return rows


def decomposition_from_csv_rows(rows: list[list]) -> Decomposition:
    entries = []
    for row in rows:
        if not row or row[0] == "j":
            continue
        try:
            weight = int(row[1])
        except ValueError:
            weight = float(row[1])
        sites = tuple(
            (int(tok.split(":")[0]), int(tok.split(":")[1])) for tok in row[2].split()
        )
        entries.append((BrokenTrace(sites), weight))
    return Decomposition(tuple(entries))
