"""Flow fields: nonnegative edge masses obeying the conservation law.

A field is built forward from boundary inflows and a birth field, or taken
apart again into exactly those data.  Arithmetic runs in one of two modes:
``"int"`` keeps exact integer identities for the discrete process, while
``"float"`` carries real masses with a fixed relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import (
    Domain,
    Edge,
    RectDomain,
    Site,
    edge_ne,
    edge_nw,
    edge_se,
    edge_sw,
)

REL_TOL = 1e-9
ABS_TOL = 1e-12


def _tolerance(scale, mode: str):
    if mode == "int":
        return 0
    return max(ABS_TOL, REL_TOL * scale)


@dataclass(frozen=True)
class BoundaryFlow:
    """Inflow data: ascending mass keyed by southwest-side site, descending
    by northwest-side site.  Missing sites carry zero."""

    up_in: dict[Site, float]
    down_in: dict[Site, float]

    @classmethod
    def zero(cls) -> "BoundaryFlow":
        return cls({}, {})

    def total(self):
        return sum(self.up_in.values()) + sum(self.down_in.values())


@dataclass(frozen=True)
class BirthField:
    """Mass of pair creation per site; support inside the domain."""

    domain: Domain
    births: dict[Site, float]

    @classmethod
    def zero(cls, domain: Domain) -> "BirthField":
        return cls(domain, {})

    def at(self, y: Site):
        return self.births.get(y, 0)


@dataclass(frozen=True)
class ExitFlow:
    """Outflow read off the exit sides: ascending on the northeast side,
    descending on the southeast side."""

    up_out: dict[Site, float]
    down_out: dict[Site, float]


@dataclass(frozen=True)
class FlowField:
    """Mass per edge of the domain closure.

    Conservation holds at every inner site: the two outgoing edges carry as
    much as the two incoming ones.  Instances are immutable after
    construction and safe to share.
    """

    domain: Domain
    mass: dict[Edge, float]
    mode: str = "float"

    def value(self, edge: Edge):
        return self.mass.get(edge, 0)

    @property
    def max_mass(self):
        return max(self.mass.values(), default=0)


def _infer_mode(values) -> str:
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            return "float"
    return "int"


def _validate_nonnegative(pairs, what: str) -> None:
    for key, v in pairs:
        if v < 0:
            raise ValueError(f"negative {what} {v!r} at {key}")


def zero_field(domain: Domain, mode: str = "float") -> FlowField:
    z = 0 if mode == "int" else 0.0
    return FlowField(domain, {e: z for e in domain.edges}, mode)


def field_from_birth(
    domain: Domain,
    boundary: BoundaryFlow | None = None,
    births: BirthField | None = None,
    mode: str | None = None,
) -> FlowField:
    """Run the forward evolution: births plus surviving inflow at each site.

    Sites are swept in increasing t; at each one the outgoing ascending mass
    is ``birth + [in_up - in_down]^+`` and symmetrically for the descending
    one, so the result conserves mass by construction.
    """
    boundary = boundary or BoundaryFlow.zero()
    births = births or BirthField.zero(domain)
    if births.domain != domain:
        raise ValueError("birth field belongs to a different domain")

    sw = set(domain.southwest_side)
    nw = set(domain.northwest_side)
    bad = set(boundary.up_in) - sw
    if bad:
        raise ValueError(f"ascending inflow keyed off the southwest side: {sorted(bad)}")
    bad = set(boundary.down_in) - nw
    if bad:
        raise ValueError(f"descending inflow keyed off the northwest side: {sorted(bad)}")
    bad = set(births.births) - domain.site_set
    if bad:
        raise ValueError(f"births outside the domain: {sorted(bad)}")
    _validate_nonnegative(boundary.up_in.items(), "inflow")
    _validate_nonnegative(boundary.down_in.items(), "inflow")
    _validate_nonnegative(births.births.items(), "birth")

    if mode is None:
        mode = _infer_mode(
            list(boundary.up_in.values())
            + list(boundary.down_in.values())
            + list(births.births.values())
        )
    zero = 0 if mode == "int" else 0.0
    cast = int if mode == "int" else float

    mass: dict[Edge, float] = {e: zero for e in domain.edges}
    for y in domain.sites:  # sorted by (t, x): predecessors come first
        if y in sw:
            in_up = cast(boundary.up_in.get(y, zero))
            mass[edge_sw(y)] = in_up
        else:
            in_up = mass[edge_sw(y)]
        if y in nw:
            in_down = cast(boundary.down_in.get(y, zero))
            mass[edge_nw(y)] = in_down
        else:
            in_down = mass[edge_nw(y)]
        born = cast(births.births.get(y, zero))
        mass[edge_ne(y)] = born + max(in_up - in_down, zero)
        mass[edge_se(y)] = born + max(in_down - in_up, zero)
    return FlowField(domain, mass, mode)


def check_conservation(field: FlowField) -> list[tuple[Site, float]]:
    """Sites where inflow and outflow disagree beyond tolerance, with residuals."""
    bad = []
    for y in field.domain.sites:
        a = field.mass[edge_sw(y)]
        b = field.mass[edge_nw(y)]
        c = field.mass[edge_ne(y)]
        d = field.mass[edge_se(y)]
        residual = abs((b + c) - (a + d))
        if residual > _tolerance(max(a, b, c, d), field.mode):
            bad.append((y, residual))
    return bad


def require_conserved(field: FlowField) -> None:
    bad = check_conservation(field)
    if bad:
        raise ValueError(f"conservation fails at {len(bad)} site(s), first: {bad[0]}")


def extract(field: FlowField) -> tuple[BoundaryFlow, BirthField, ExitFlow]:
    """Invert the forward construction: recover inflows, births and exits.

    Births come out as the smaller of the two outgoing masses; the roundtrip
    through :func:`field_from_birth` reproduces the field exactly in integer
    mode and within tolerance in float mode.
    """
    domain = field.domain
    if not isinstance(domain, RectDomain):
        raise ValueError("extraction is defined on rectangular domains only")
    require_conserved(field)
    up_in = {y: field.mass[edge_sw(y)] for y in domain.southwest_side}
    down_in = {y: field.mass[edge_nw(y)] for y in domain.northwest_side}
    births = {}
    for y in domain.sites:
        b = min(field.mass[edge_ne(y)], field.mass[edge_se(y)])
        if b != 0:
            births[y] = b
    up_out = {y: field.mass[edge_ne(y)] for y in domain.northeast_side}
    down_out = {y: field.mass[edge_se(y)] for y in domain.southeast_side}
    return (
        BoundaryFlow(up_in, down_in),
        BirthField(domain, births),
        ExitFlow(up_out, down_out),
    )


def total_crossing_flow(field: FlowField):
    """Total mass crossing the domain: west-side inflow plus southeast exits.

    The same mass leaves through the other two sides; the two sums are
    compared and a disagreement beyond tolerance signals a corrupt field.
    """
    domain = field.domain
    if not isinstance(domain, RectDomain):
        raise ValueError("crossing flow is defined on rectangular domains only")
    left = sum(field.mass[edge_sw(y)] for y in domain.southwest_side) + sum(
        field.mass[edge_se(y)] for y in domain.southeast_side
    )
    right = sum(field.mass[edge_nw(y)] for y in domain.northwest_side) + sum(
        field.mass[edge_ne(y)] for y in domain.northeast_side
    )
    if abs(left - right) > _tolerance(max(left, right, 1), field.mode):
        raise ValueError(f"crossing-flow sums disagree: {left} vs {right}")
    return left


def add_fields(a: FlowField, b: FlowField) -> FlowField:
    """Edgewise sum; the conservation law is linear so validity is preserved."""
    if a.domain != b.domain:
        raise ValueError("cannot add fields on different domains")
    if a.mode != b.mode:
        raise ValueError("cannot mix integer and float fields")
    return FlowField(a.domain, {e: a.mass[e] + b.mass[e] for e in a.domain.edges}, a.mode)


def max_edge_gap(a: FlowField, b: FlowField):
    """Largest edgewise difference between two fields on one domain."""
    if a.domain != b.domain:
        raise ValueError("fields live on different domains")
    return max(abs(a.mass[e] - b.mass[e]) for e in a.domain.edges)


def field_to_dict(f: FlowField) -> dict:
    return {
        "domain": f.domain.to_dict(),
        "mode": f.mode,
        "edges": [
            {"t": e.t, "x": e.x, "slope": "up" if e.up else "down", "mass": f.mass[e]}
            for e in f.domain.edges
        ],
    }


def field_from_dict(d: dict) -> FlowField:
    from .lattice import domain_from_dict

    domain = domain_from_dict(d["domain"])
    mode = d.get("mode", "float")
    cast = int if mode == "int" else float
    zero = 0 if mode == "int" else 0.0
    mass = {e: zero for e in domain.edges}
    for row in d["edges"]:
        e = Edge(int(row["t"]), int(row["x"]), row["slope"] == "up")
        if e not in mass:
            raise ValueError(f"edge {e} outside the domain closure")
        v = cast(row["mass"])
        if v < 0:
            raise ValueError(f"negative mass on {e}")
        mass[e] = v
    return FlowField(domain, mass, mode)
