import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brokenlines.flow import (
    BirthField,
    extract,
    field_from_birth,
    max_edge_gap,
    total_crossing_flow,
    zero_field,
)
from brokenlines.lattice import (
    HexDomain,
    RectDomain,
    edge_ne,
    edge_nw,
    edge_se,
    edge_sw,
    incident_edges,
)
from brokenlines.lines import (
    BrokenTrace,
    Decomposition,
    Order,
    brick_diagram,
    compare_traces,
    compose,
    decompose,
    decomposition_from_csv_rows,
    decomposition_to_csv_rows,
    field_of_line,
    line_fields,
    maximal_line,
    trace_crosses,
    trace_weight,
)
from brokenlines.streams import uniform
from helpers import random_domain, random_field

D3 = RectDomain(3, 3)

# Independently derived splitting of the all-ones 3x3 field: five unit
# strips, from the hugging V up to the top-right corner wedge.
ONES_3X3_TRACES = (
    ((3, -3), (2, -2), (1, -1), (0, 0), (1, 1), (2, 2), (3, 3)),
    ((3, -3), (2, -2), (1, -1), (2, 0), (1, 1), (2, 2), (3, 3)),
    ((3, -3), (2, -2), (3, -1), (2, 0), (3, 1), (2, 2), (3, 3)),
    ((4, -2), (3, -1), (4, 0), (3, 1), (4, 2)),
    ((5, -1), (4, 0), (5, 1)),
)


def v_trace(apex, arm=2):
    """Wedge through ``apex``: down-arm then up-arm, ordered by x."""
    t, x = apex
    left = [(t + k, x - k) for k in range(arm, 0, -1)]
    right = [(t + k, x + k) for k in range(1, arm + 1)]
    return BrokenTrace(tuple(left) + ((t, x),) + tuple(right))


def crossing_wedge(domain, apex):
    """Wedge through ``apex`` with both arms run out to the first outer site."""
    t, x = apex
    arms = []
    for step in (-1, 1):
        arm = []
        k = 1
        while domain.contains((t + k, x + step * k)):
            arm.append((t + k, x + step * k))
            k += 1
        arm.append((t + k, x + step * k))
        arms.append(arm)
    down, up = arms
    return BrokenTrace(tuple(reversed(down)) + ((t, x),) + tuple(up))


def single_birth_field(domain, apex, w):
    return field_from_birth(domain, births=BirthField(domain, {apex: w}))


# ---------------------------------------------------------------- traces


def test_trace_validation():
    with pytest.raises(ValueError):
        BrokenTrace(((0, 0),))
    with pytest.raises(ValueError):
        BrokenTrace(((0, 0), (2, 1)))
    with pytest.raises(ValueError):
        BrokenTrace(((0, 0), (1, 2)))
    with pytest.raises(ValueError):
        BrokenTrace(((0, 1), (1, 2)))  # odd parity


def test_trace_views():
    tr = v_trace((2, 0), arm=2)
    assert tr.left_corners == ((2, 0),)
    assert tr.x_low == -2 and tr.x_high == 2
    assert tr.t_at(0) == 2
    assert tr.t_span() == (2, 4)
    assert len(tr.edges) == 4
    sub = BrokenTrace(((3, -1), (2, 0), (3, 1)))
    assert sub.is_subtrace_of(tr)
    assert not tr.is_subtrace_of(sub)


def test_compare_equal_and_shifted():
    a = v_trace((0, 0))
    b = v_trace((2, 0))
    assert compare_traces(a, a) is Order.EQUAL
    assert compare_traces(b, a) is Order.RIGHT_OF
    assert compare_traces(a, b) is Order.LEFT_OF


def test_compare_disjoint_domains_use_span_clause():
    a = BrokenTrace(((0, 0), (1, 1)))
    b = BrokenTrace(((9, 5), (8, 6)))
    assert compare_traces(a, b) is Order.LEFT_OF
    assert compare_traces(b, a) is Order.RIGHT_OF


def test_compare_incomparable_crossing_segments():
    # the two segments cross: each is earlier on one shared height
    a = BrokenTrace(((0, 0), (1, 1), (2, 2)))
    b = BrokenTrace(((2, 0), (1, 1), (0, 2)))
    assert compare_traces(a, b) is Order.INCOMPARABLE


def test_compare_subtrace_is_order_equivalent():
    tr = v_trace((2, 0))
    sub = BrokenTrace(((3, -1), (2, 0), (3, 1)))
    assert compare_traces(tr, sub) is Order.EQUAL


def random_crossing_trace(domain, seed):
    """Seeded walk from a lower outer site through S until it exits above."""
    from brokenlines.lattice import edge_between

    starts = sorted(set(domain.outer_southwest) | set(domain.outer_southeast))
    y = starts[int(uniform(seed, 0) * len(starts))]
    sites = [y]
    k = 1
    while True:
        t, x = sites[-1]
        legal = []
        for nxt in ((t + 1, x + 1), (t - 1, x + 1)):
            if edge_between((t, x), nxt) not in domain.edge_set:
                continue
            if domain.contains(nxt):
                legal.append((nxt, False))
            elif domain.in_closure(nxt):
                legal.append((nxt, True))
        nxt, stop = legal[int(uniform(seed, k) * len(legal))]
        sites.append(nxt)
        k += 1
        if stop:
            return BrokenTrace(tuple(sites))


@given(st.integers(0, 300))
@settings(max_examples=60, deadline=None)
def test_order_is_partial_order_on_crossing_traces(seed):
    domain = RectDomain(1 + seed % 4, 1 + (seed // 4) % 4)
    traces = [random_crossing_trace(domain, seed * 10 + i) for i in range(3)]
    for tr in traces:
        assert trace_crosses(domain, tr)
    a, b, c = traces
    # antisymmetry: mutual domination only for identical traces
    if compare_traces(a, b) is Order.EQUAL:
        assert a == b
    # transitivity
    if compare_traces(a, b) in (Order.RIGHT_OF, Order.EQUAL) and compare_traces(b, c) in (
        Order.RIGHT_OF,
        Order.EQUAL,
    ):
        assert compare_traces(a, c) in (Order.RIGHT_OF, Order.EQUAL)
    # disjoint heights force disjoint t-spans (crossing traces only)
    if set(range(a.x_low, a.x_high + 1)).isdisjoint(range(b.x_low, b.x_high + 1)):
        lo_a, hi_a = a.t_span()
        lo_b, hi_b = b.t_span()
        assert hi_a < lo_b or hi_b < lo_a


# ----------------------------------------------------- decomposition


def test_decompose_zero_field_is_empty():
    dec = decompose(zero_field(D3))
    assert len(dec) == 0
    assert dec.total_weight() == 0


def test_single_birth_decomposes_into_one_wedge():
    f = single_birth_field(D3, (2, 0), 1.75)
    dec = decompose(f)
    assert len(dec) == 1
    trace, w = dec.entries[0]
    assert w == pytest.approx(1.75)
    assert trace.sites == ((4, -2), (3, -1), (2, 0), (3, 1), (4, 2))


def test_all_ones_matches_hand_run():
    births = BirthField(D3, {y: 1 for y in D3.sites})
    f = field_from_birth(D3, births=births)
    dec = decompose(f)
    assert tuple(tr.sites for tr in dec.traces()) == ONES_3X3_TRACES
    assert dec.weights() == (1, 1, 1, 1, 1)
    assert dec.total_weight() == total_crossing_flow(f) == 5


def test_every_site_carries_one_corner_in_ones_field():
    births = {}
    for trace_sites in ONES_3X3_TRACES:
        for y in BrokenTrace(trace_sites).left_corners:
            births[y] = births.get(y, 0) + 1
    assert births == {y: 1 for y in D3.sites}


def test_compose_single_wedge_equals_single_birth():
    tr = v_trace((2, 0))
    f = compose(D3, Decomposition(((tr, 2.5),)))
    assert max_edge_gap(f, single_birth_field(D3, (2, 0), 2.5)) == 0


def test_compose_empty_is_zero():
    f = compose(D3, Decomposition(()))
    assert all(v == 0 for v in f.mass.values())


def test_compose_two_wedges_extracts_two_births():
    d = RectDomain(4, 4)
    left = crossing_wedge(d, (2, 0))
    right = crossing_wedge(d, (4, 0))
    f = compose(d, Decomposition(((left, 1.0), (right, 2.0))))
    _, births, _ = extract(f)
    assert births.births == {(2, 0): 1.0, (4, 0): 2.0}


def test_compose_validation():
    tr = v_trace((2, 0))
    with pytest.raises(ValueError):
        compose(D3, Decomposition(((tr, 0.0),)))
    with pytest.raises(ValueError):
        compose(D3, Decomposition(((v_trace((4, 0)), 1.0), (v_trace((2, 0)), 1.0))))
    inner = BrokenTrace(((3, -1), (2, 0), (3, 1)))  # does not cross
    with pytest.raises(ValueError):
        compose(D3, Decomposition(((inner, 1.0),)))


@given(st.integers(0, 400), st.sampled_from(["float", "int"]))
@settings(max_examples=60, deadline=None)
def test_roundtrip_both_ways(seed, mode):
    domain = random_domain(seed, max_side=6)
    f = random_field(domain, seed=seed, mode=mode)
    dec = decompose(f)
    g = compose(domain, dec, mode=mode)
    assert max_edge_gap(f, g) <= (0 if mode == "int" else 1e-9)
    dec2 = decompose(g)
    assert dec2.traces() == dec.traces()
    tol = 0 if mode == "int" else 1e-9
    assert all(abs(a - b) <= tol for a, b in zip(dec.weights(), dec2.weights()))


@given(st.integers(0, 400))
@settings(max_examples=40, deadline=None)
def test_decomposition_is_ordered_and_crossing(seed):
    domain = random_domain(seed, max_side=5)
    dec = decompose(random_field(domain, seed=seed))
    traces = dec.traces()
    for tr in traces:
        assert trace_crosses(domain, tr)
    for a, b in zip(traces, traces[1:]):
        assert compare_traces(a, b) is Order.LEFT_OF
    assert all(w > 0 for w in dec.weights())


@given(st.integers(0, 400))
@settings(max_examples=40, deadline=None)
def test_decomposition_additivity(seed):
    domain = random_domain(seed, max_side=5)
    f = random_field(domain, seed=seed)
    boundary, births, _ = extract(f)
    sum_births: dict = {}
    sum_up: dict = {}
    sum_down: dict = {}
    for trace, w in decompose(f):
        b, z, _ = line_fields(domain, trace, w)
        for y, v in b.births.items():
            sum_births[y] = sum_births.get(y, 0.0) + v
        for y, v in z.up_in.items():
            sum_up[y] = sum_up.get(y, 0.0) + v
        for y, v in z.down_in.items():
            sum_down[y] = sum_down.get(y, 0.0) + v
    scale = max(1.0, f.max_mass)
    for y in domain.sites:
        assert abs(births.births.get(y, 0) - sum_births.get(y, 0)) <= 1e-9 * scale
    for y in domain.southwest_side:
        assert abs(boundary.up_in.get(y, 0) - sum_up.get(y, 0)) <= 1e-9 * scale
    for y in domain.northwest_side:
        assert abs(boundary.down_in.get(y, 0) - sum_down.get(y, 0)) <= 1e-9 * scale


@given(st.integers(0, 300))
@settings(max_examples=30, deadline=None)
def test_total_weight_matches_crossing_flow(seed):
    domain = random_domain(seed, max_side=6)
    f = random_field(domain, seed=seed)
    dec = decompose(f)
    assert abs(dec.total_weight() - total_crossing_flow(f)) <= 1e-9 * max(
        1.0, f.max_mass
    ) * len(dec.entries or [1])


# ---------------------------------------------------- trace weights


def test_single_edge_traces_recover_masses():
    f = random_field(RectDomain(3, 3), seed=21)
    for e in f.domain.edges:
        tr_sites = tuple(sorted((e.base, e.head), key=lambda y: y[1]))
        w = trace_weight(f, BrokenTrace(tr_sites))
        assert w == pytest.approx(f.mass[e], abs=1e-12)


def test_wedge_traces_recover_births():
    f = random_field(RectDomain(3, 3), seed=22)
    _, births, _ = extract(f)
    for y in f.domain.sites:
        t, x = y
        wedge = BrokenTrace(((t + 1, x - 1), y, (t + 1, x + 1)))
        assert trace_weight(f, wedge) == pytest.approx(births.births.get(y, 0), abs=1e-12)


def test_zero_field_weights():
    f = zero_field(D3)
    assert trace_weight(f, v_trace((2, 0))) == 0


def test_trace_weight_outside_closure_rejected():
    f = zero_field(D3)
    with pytest.raises(ValueError):
        trace_weight(f, BrokenTrace(((10, 0), (11, 1))))


@given(st.integers(0, 300))
@settings(max_examples=40, deadline=None)
def test_weight_monotone_under_extension(seed):
    domain = random_domain(seed, max_side=5)
    f = random_field(domain, seed=seed)
    dec = decompose(f)
    if not dec.entries:
        return
    trace, w = dec.entries[int(uniform(seed, 7) * len(dec.entries))]
    n = len(trace.sites)
    lo = int(uniform(seed, 8) * (n - 1))
    hi = min(n, lo + 2 + int(uniform(seed, 9) * (n - lo - 1)))
    sub = BrokenTrace(trace.sites[lo:hi])
    assert trace_weight(f, sub) >= trace_weight(f, trace) - 1e-12
    assert trace_weight(f, trace) == pytest.approx(w, abs=1e-9)


@given(st.integers(0, 300))
@settings(max_examples=30, deadline=None)
def test_subtrace_weight_sums_containing_lines(seed):
    domain = random_domain(seed, max_side=5)
    f = random_field(domain, seed=seed)
    dec = decompose(f)
    if not dec.entries:
        return
    trace, _ = dec.entries[int(uniform(seed, 3) * len(dec.entries))]
    lo = int(uniform(seed, 4) * (len(trace.sites) - 1))
    sub = BrokenTrace(trace.sites[lo : lo + 2])
    expected = sum(w for tr, w in dec if sub.is_subtrace_of(tr))
    assert trace_weight(f, sub) == pytest.approx(expected, abs=1e-9)


@given(st.integers(0, 300))
@settings(max_examples=30, deadline=None)
def test_containment_is_interval_shaped(seed):
    # a sub-trace shared by two lines is shared by every line between them
    domain = random_domain(seed, max_side=5)
    f = random_field(domain, seed=seed)
    dec = decompose(f)
    traces = dec.traces()
    for j, trace in enumerate(traces):
        lo = int(uniform(seed, j) * (len(trace.sites) - 1))
        sub = BrokenTrace(trace.sites[lo : lo + 2])
        holders = [k for k, other in enumerate(traces) if sub.is_subtrace_of(other)]
        assert holders == list(range(holders[0], holders[-1] + 1))


@given(st.integers(0, 300))
@settings(max_examples=30, deadline=None)
def test_positive_weight_traces_are_comparable(seed):
    domain = random_domain(seed, max_side=5)
    f = random_field(domain, seed=seed)
    dec = decompose(f)
    if len(dec.entries) < 2:
        return
    ts = dec.traces()
    i = int(uniform(seed, 5) * len(ts))
    j = int(uniform(seed, 6) * len(ts))
    a, b = ts[i], ts[j]
    sub_a = BrokenTrace(a.sites[: 2 + int(uniform(seed, 7) * (len(a.sites) - 1))])
    sub_b = BrokenTrace(b.sites[len(b.sites) - 2 :])
    if trace_weight(f, sub_a) > 0 and trace_weight(f, sub_b) > 0:
        assert compare_traces(sub_a, sub_b) is not Order.INCOMPARABLE


@given(st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_crossing_traces_carry_line_weights_or_nothing(seed):
    # the characterization: a crossing trace weighs w_j if it is the j-th
    # line of the decomposition and exactly zero otherwise
    domain = random_domain(seed, max_side=4)
    f = random_field(domain, seed=seed)
    dec = decompose(f)
    by_trace = {tr: w for tr, w in dec}
    probe = random_crossing_trace(domain, seed + 13)
    expected = by_trace.get(probe, 0.0)
    assert trace_weight(f, probe) == pytest.approx(expected, abs=1e-9)


def test_breakpoints_end_at_total_crossing_flow():
    for seed in range(20):
        domain = random_domain(seed + 40, max_side=6)
        f = random_field(domain, seed=seed + 40)
        diagram = brick_diagram(f)
        assert diagram.breakpoints[0] == 0
        assert diagram.breakpoints[-1] == pytest.approx(total_crossing_flow(f), abs=1e-9)


def test_near_tied_breakpoints_are_merged():
    # two heights apart by well under the dedup width must not create a
    # spurious sliver strip
    d = RectDomain(5, 5)
    births = BirthField(d, {(2, 0): 1.0, (6, 0): 1.0 + 5e-13})
    f = field_from_birth(d, births=births)
    dec = decompose(f)
    assert len(dec) == 2
    assert all(w > 1e-6 for w in dec.weights())
    rebuilt = compose(d, dec)
    assert max_edge_gap(f, rebuilt) <= 1e-9


# ---------------------------------------------------- maximal lines


def association_cases(field, births, line):
    """Check every adjacent interval pair against the association rules."""
    eta = field.mass
    trace = line.trace
    intervals = line.intervals
    tol = 1e-9 * max(1.0, float(field.max_mass))

    def close(a, b):
        return abs(a - b) <= tol

    for i in range(1, len(trace.edges)):
        y = trace.sites[i]
        prev_site, next_site = trace.sites[i - 1], trace.sites[i + 1]
        e_in, e_out = trace.edges[i - 1], trace.edges[i]
        (a1, b1), (a2, b2) = intervals[i - 1], intervals[i]
        sw, nw, ne, se = (eta[e] for e in incident_edges(y))
        xi = births.births.get(y, 0)
        came_low = prev_site == (y[0] - 1, y[1] - 1)  # arrived via the sw edge
        goes_high = next_site == (y[0] + 1, y[1] + 1)  # leaves via the ne edge
        if came_low and not goes_high:  # case 1: sw ~ nw, same labels
            assert close(a1, a2) and close(b1, b2)
            assert b1 <= min(sw, nw) + tol
        elif not came_low and not goes_high:  # case 2: se ~ nw, shift by sw
            assert close(a2, a1 + sw) and close(b2, b1 + sw)
            assert b2 <= nw + tol
        elif came_low and goes_high:  # case 3: sw ~ ne, shift by nw
            assert close(a2, a1 - nw) and close(b2, b1 - nw)
            assert a1 >= nw - tol
        else:  # case 4: se ~ ne, aligned to the young end
            assert close(se - b1, ne - b2)
            assert a1 >= se - xi - tol and a2 >= ne - xi - tol
        assert a1 >= -tol and b1 <= eta[e_in] + tol
        assert a2 >= -tol and b2 <= eta[e_out] + tol


def test_maximal_line_single_birth():
    f = single_birth_field(D3, (2, 0), 2.0)
    tr = BrokenTrace(((4, -2), (3, -1), (2, 0), (3, 1), (4, 2)))
    line = maximal_line(f, tr)
    assert line.weight == pytest.approx(2.0)
    assert all((a, b) == (0.0, 2.0) for a, b in line.intervals)
    sub = BrokenTrace(tr.sites[1:4])
    assert maximal_line(f, sub).weight == pytest.approx(2.0)


def test_maximal_line_empty_when_no_flow():
    f = single_birth_field(D3, (2, 0), 2.0)
    dead = BrokenTrace(((1, -1), (0, 0), (1, 1)))
    line = maximal_line(f, dead)
    assert line.is_empty
    assert line.weight == 0


@given(st.integers(0, 300), st.sampled_from(["float", "int"]))
@settings(max_examples=40, deadline=None)
def test_maximal_lines_satisfy_association_rules(seed, mode):
    domain = random_domain(seed, max_side=5)
    f = random_field(domain, seed=seed, mode=mode)
    _, births, _ = extract(f)
    dec = decompose(f)
    for trace, w in dec.entries[:6]:
        line = maximal_line(f, trace)
        assert line.weight == pytest.approx(w, abs=1e-9)
        association_cases(f, births, line)


def discrete_next_label(field, births, y, came_low, goes_high, p_in):
    """Label transported across one site by the integer association rules."""
    eta = field.mass
    sw, nw, ne, se = (eta[e] for e in incident_edges(y))
    xi = births.births.get(y, 0)
    if came_low and not goes_high:  # annihilation pair
        if p_in <= min(sw, nw):
            return p_in
    elif not came_low and not goes_high:  # descending pass-through
        p_out = p_in + sw
        if p_out <= nw:
            return p_out
    elif came_low and goes_high:  # ascending pass-through
        if p_in > nw and p_in <= sw:
            return p_in - nw
    else:  # birth pair, matched from the young end
        p_out = p_in + ne - se
        if se - xi < p_in <= se and ne - xi < p_out <= ne:
            return p_out
    return None


@given(st.integers(0, 300))
@settings(max_examples=25, deadline=None)
def test_integer_lines_are_maximal(seed):
    # the label just below a maximal interval must fail to chain through
    domain = random_domain(seed, max_side=4)
    f = random_field(domain, seed=seed, mode="int")
    _, births, _ = extract(f)
    for trace, w in decompose(f).entries[:4]:
        line = maximal_line(f, trace)
        start = line.intervals[0][0]
        if start < 1:
            continue
        label = start  # one below the smallest admissible label
        survived = True
        for i in range(1, len(trace.edges)):
            y = trace.sites[i]
            came_low = trace.sites[i - 1] == (y[0] - 1, y[1] - 1)
            goes_high = trace.sites[i + 1] == (y[0] + 1, y[1] + 1)
            label = discrete_next_label(f, births, y, came_low, goes_high, label)
            if label is None:
                survived = False
                break
        assert not survived


@given(st.integers(0, 300))
@settings(max_examples=25, deadline=None)
def test_integer_lines_reproduce_discrete_labels(seed):
    domain = random_domain(seed, max_side=4)
    f = random_field(domain, seed=seed, mode="int")
    _, births, _ = extract(f)
    for trace, w in decompose(f).entries[:4]:
        line = maximal_line(f, trace)
        assert all(isinstance(v, int) for ab in line.intervals for v in ab)
        # unit labels: p corresponds to the slice (p-1, p]
        for offset in range(1, int(w) + 1):
            labels = [a + offset for a, _ in line.intervals]
            for i in range(1, len(trace.edges)):
                y = trace.sites[i]
                came_low = trace.sites[i - 1] == (y[0] - 1, y[1] - 1)
                goes_high = trace.sites[i + 1] == (y[0] + 1, y[1] + 1)
                nxt = discrete_next_label(f, births, y, came_low, goes_high, labels[i - 1])
                assert nxt == labels[i]


def all_crossing_traces(domain):
    """Exhaustive DFS over crossing traces of a small domain."""
    from brokenlines.lattice import edge_between

    out = []

    def extend(sites):
        t, x = sites[-1]
        for nxt in ((t + 1, x + 1), (t - 1, x + 1)):
            if edge_between((t, x), nxt) not in domain.edge_set:
                continue
            if domain.contains(nxt):
                extend(sites + [nxt])
            elif domain.in_closure(nxt):
                out.append(BrokenTrace(tuple(sites + [nxt])))

    for start in sorted(set(domain.outer_southwest) | set(domain.outer_southeast)):
        extend([start])
    return out


def association_weight(field, births, trace):
    """Trace weight by forward interval propagation through the case rules.

    Independent of the brick diagram: carries the feasible label interval
    along the trace, intersecting with each case's domain and translating.
    Returns the final interval (empty as ``None``) and its width.
    """
    eta = field.mass
    lo, hi = 0.0, eta[trace.edges[0]]
    for i in range(1, len(trace.edges)):
        y = trace.sites[i]
        sw, nw, ne, se = (eta[e] for e in incident_edges(y))
        xi = births.births.get(y, 0)
        came_low = trace.sites[i - 1] == (y[0] - 1, y[1] - 1)
        goes_high = trace.sites[i + 1] == (y[0] + 1, y[1] + 1)
        if came_low and not goes_high:  # annihilation: labels unchanged
            window, shift = (0, min(sw, nw)), 0
        elif not came_low and not goes_high:  # descending pass-through
            window, shift = (0, nw - sw), sw
        elif came_low and goes_high:  # ascending pass-through
            window, shift = (nw, sw), -nw
        else:  # birth pair
            window, shift = (se - xi, se), ne - se
        lo, hi = max(lo, window[0]) + shift, min(hi, window[1]) + shift
        if hi <= lo:
            return None, 0.0
    return (lo, hi), hi - lo


@given(st.integers(0, 200), st.sampled_from(["float", "int"]))
@settings(max_examples=25, deadline=None)
def test_decomposition_agrees_with_association_oracle(seed, mode):
    domain = random_domain(seed, max_side=3)
    f = random_field(domain, seed=seed, mode=mode)
    _, births, _ = extract(f)
    dec = {tr: w for tr, w in decompose(f)}
    tol = 0 if mode == "int" else 1e-9 * max(1.0, float(f.max_mass))
    positives = {}
    for trace in all_crossing_traces(domain):
        interval, width = association_weight(f, births, trace)
        assert abs(trace_weight(f, trace) - width) <= tol
        if width > max(tol, 1e-9):
            positives[trace] = width
            line = maximal_line(f, trace)
            assert abs(line.intervals[-1][0] - interval[0]) <= tol
            assert abs(line.intervals[-1][1] - interval[1]) <= tol
    assert set(positives) == set(dec)
    for trace, width in positives.items():
        assert abs(dec[trace] - width) <= tol


# ---------------------------------------------------- brick diagram


def test_brick_diagram_zero_field():
    diagram = brick_diagram(zero_field(D3))
    assert diagram.breakpoints == (0.0,)
    assert diagram.strip_count == 0


def test_brick_diagram_single_birth():
    diagram = brick_diagram(single_birth_field(D3, (2, 0), 3.0))
    assert diagram.breakpoints == (0.0, 3.0)
    assert diagram.strip_count == 1


@given(st.integers(0, 300))
@settings(max_examples=40, deadline=None)
def test_heights_difference_identity(seed):
    domain = RectDomain(4, 4)
    f = random_field(domain, seed=seed)
    h = brick_diagram(f).heights
    for y in domain.sites:
        t, x = y
        assert f.mass[edge_sw(y)] == pytest.approx(h[(t, x - 1)] - h[(t - 1, x)], abs=1e-9)
        assert f.mass[edge_se(y)] == pytest.approx(h[(t + 1, x)] - h[(t, x - 1)], abs=1e-9)
        assert f.mass[edge_nw(y)] == pytest.approx(h[(t, x + 1)] - h[(t - 1, x)], abs=1e-9)
        assert f.mass[edge_ne(y)] == pytest.approx(h[(t + 1, x)] - h[(t, x + 1)], abs=1e-9)


def test_brick_diagram_rejects_hexagons_and_bad_fields():
    hexa = HexDomain(0, 4, 2, 2, (0, -1, -2, -1, 0), (0, 1, 2, 1, 0))
    f = field_from_birth(hexa, births=BirthField(hexa, {(2, 0): 1.0}))
    with pytest.raises(ValueError):
        brick_diagram(f)
    broken = zero_field(D3)
    mass = dict(broken.mass)
    mass[edge_ne((2, 0))] = 1.0
    from brokenlines.flow import FlowField

    with pytest.raises(ValueError):
        brick_diagram(FlowField(D3, mass, "float"))


# ---------------------------------------------------- line fields


def test_line_fields_wedge():
    tr = v_trace((2, 0))
    births, boundary, field = line_fields(D3, tr, 1.0)
    assert births.births == {(2, 0): 1.0}
    assert boundary.up_in == {} and boundary.down_in == {}
    assert field.mass[edge_ne((2, 0))] == 1.0
    assert sum(v != 0 for v in field.mass.values()) == len(tr.edges)


def test_line_fields_straight_ascent():
    tr = BrokenTrace(((-1, -1), (0, 0), (1, 1), (2, 2), (3, 3)))
    births, boundary, _ = line_fields(D3, tr, 2.0)
    assert births.births == {}
    assert boundary.up_in == {(0, 0): 2.0}
    assert boundary.down_in == {}


def test_line_fields_zero_weight():
    births, boundary, field = line_fields(D3, v_trace((2, 0)), 0.0)
    assert births.births == {} and boundary.up_in == {}
    assert all(v == 0 for v in field.mass.values())


def test_crossing_line_field_equals_forward_construction():
    for seed in range(12):
        domain = random_domain(seed + 900, max_side=5)
        dec = decompose(random_field(domain, seed=seed + 900))
        if not dec.entries:
            continue
        trace, w = dec.entries[0]
        _, _, direct = line_fields(domain, trace, w)
        rebuilt = field_of_line(domain, trace, w)
        assert max_edge_gap(direct, rebuilt) <= 1e-12


# ---------------------------------------------------- serialization


def test_decomposition_csv_roundtrip():
    f = random_field(RectDomain(3, 3), seed=77, mode="int")
    dec = decompose(f)
    rows = decomposition_to_csv_rows(dec)
    assert rows[0] == ["j", "weight", "sites"]
    back = decomposition_from_csv_rows([[str(c) for c in row] for row in rows])
    assert back.traces() == dec.traces()
    assert back.weights() == dec.weights()
