"""Finite causal sites and causal-structure queries.

A causal site is a finite set of events carrying a strict partial order,
the discrete stand-in for the causal structure of a globally hyperbolic
spacetime.  The order is kept in two redundant forms: the covering relation
(transitive reduction) and the full reachability matrix (transitive
closure).  All queries below -- causal/chronological cones, domains of
dependence, region boundaries, spacelike separation -- are defined purely
in terms of these data plus, where needed, integer lattice coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NonIsometry, SiteMismatch
from .reports import VerificationReport

Coords = tuple[int, int]


@dataclass(frozen=True)
class Event:
    """One spacetime point: an opaque id plus optional (t, x) lattice coords."""

    id: int
    coords: Optional[Coords] = None


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0


def _transitive_closure(covers: np.ndarray) -> np.ndarray:
    reach = covers.copy()
    while True:
        step = reach | _bool_matmul(reach, reach)
        if np.array_equal(step, reach):
            return reach
        reach = step


class CausalSite:
    """A finite event set with a strict (irreflexive, transitive) order.

    Instances are immutable after construction; all queries are read-only.
    Construction validates irreflexivity, antisymmetry and transitivity, so
    no site can encode a closed causal curve.
    """

    def __init__(
        self,
        relation: np.ndarray,
        coords: Optional[Sequence[Optional[Coords]]] = None,
        cone_slope: Optional[int] = None,
    ):
        rel = np.array(relation, dtype=bool)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
            raise ValueError("relation must be a square boolean matrix")
        n = rel.shape[0]
        if n == 0:
            raise ValueError("a causal site needs at least one event")
        if rel.diagonal().any():
            raise ValueError("relation must be irreflexive")
        if (rel & rel.T).any():
            raise ValueError("relation must be antisymmetric")
        if (_bool_matmul(rel, rel) & ~rel).any():
            raise ValueError("relation must be transitive")

        if coords is not None:
            coords = tuple(None if c is None else (int(c[0]), int(c[1])) for c in coords)
            if len(coords) != n:
                raise ValueError("one coordinate entry per event required")
        if cone_slope is not None and cone_slope < 1:
            raise ValueError("cone_slope must be a positive integer")

        self._n = n
        self._reach = rel
        self._covers = rel & ~_bool_matmul(rel, rel)
        self._coords = coords
        self._cone_slope = int(cone_slope) if cone_slope is not None else None
        self._coord_index = (
            {c: i for i, c in enumerate(coords) if c is not None} if coords else {}
        )
        self._reach.setflags(write=False)
        self._covers.setflags(write=False)
        # sanity: closure of the stored covering relation is the relation itself
        assert np.array_equal(_transitive_closure(self._covers), self._reach)

    # ------------------------------------------------------------------
    @classmethod
    def from_covers(
        cls,
        n: int,
        cover_pairs: Iterable[tuple[int, int]],
        coords: Optional[Sequence[Optional[Coords]]] = None,
        cone_slope: Optional[int] = None,
    ) -> "CausalSite":
        covers = np.zeros((n, n), dtype=bool)
        for a, b in cover_pairs:
            covers[a, b] = True
        return cls(_transitive_closure(covers), coords, cone_slope)

    @property
    def n(self) -> int:
        return self._n

    @property
    def reach(self) -> np.ndarray:
        """Strict reachability matrix: reach[p, q] iff p strictly precedes q."""
        return self._reach

    @property
    def cover_pairs(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(self._covers)
        return sorted(zip(ii.tolist(), jj.tolist()))

    @property
    def cone_slope(self) -> Optional[int]:
        return self._cone_slope

    @property
    def has_coords(self) -> bool:
        return self._coords is not None and self._cone_slope is not None

    def coords_of(self, event_id: int) -> Optional[Coords]:
        if self._coords is None:
            return None
        return self._coords[event_id]

    @property
    def events(self) -> list[Event]:
        return [Event(i, self.coords_of(i)) for i in range(self._n)]

    def precedes(self, p: int, q: int) -> bool:
        return bool(self._reach[p, q])

    def minimal_ids(self) -> frozenset[int]:
        return frozenset(np.nonzero(~self._reach.any(axis=0))[0].tolist())

    def maximal_ids(self) -> frozenset[int]:
        return frozenset(np.nonzero(~self._reach.any(axis=1))[0].tolist())

    def predecessors(self, q: int) -> list[int]:
        """Immediate (covering) predecessors of q."""
        return np.nonzero(self._covers[:, q])[0].tolist()

    def successors(self, p: int) -> list[int]:
        """Immediate (covering) successors of p."""
        return np.nonzero(self._covers[p, :])[0].tolist()

    def id_at(self, t: int, x: int) -> int:
        """Event id for lattice coordinates; raises on non-lattice sites."""
        self._require_coords()
        try:
            return self._coord_index[(t, x)]
        except KeyError:
            raise KeyError(f"no event at (t={t}, x={x})") from None

    def reversed(self) -> "CausalSite":
        """The time-reversed site (order flipped, t coordinate mirrored)."""
        coords = None
        if self._coords is not None:
            ts = [c[0] for c in self._coords if c is not None]
            tmax = max(ts) if ts else 0
            coords = tuple(
                None if c is None else (tmax - c[0], c[1]) for c in self._coords
            )
        return CausalSite(self._reach.T, coords, self._cone_slope)

    def _require_coords(self) -> None:
        if not self.has_coords:
            raise SiteMismatch(
                "operation needs lattice coordinates and a cone slope; "
                "this site has none"
            )

    def __repr__(self) -> str:
        kind = f"lattice(slope={self._cone_slope})" if self.has_coords else "poset"
        return f"CausalSite(n={self._n}, {kind})"


# ----------------------------------------------------------------------
# Regions and slices


@dataclass(frozen=True)
class Region:
    """A subset of a site's events.  Finite, hence closed: closure(R) = R."""

    site: CausalSite
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(m) for m in self.members))
        bad = [m for m in self.members if not (0 <= m < self.site.n)]
        if bad:
            raise SiteMismatch(f"event ids {bad} outside site range")

    @classmethod
    def from_coords(cls, site: CausalSite, points: Iterable[Coords]) -> "Region":
        return cls(site, frozenset(site.id_at(t, x) for t, x in points))

    def __len__(self) -> int:
        return len(self.members)

    def sorted_ids(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class Slice(Region):
    """An acausal region: no two members are causally related."""

    def __post_init__(self):
        super().__post_init__()
        if not is_acausal(self.site, Region(self.site, self.members)):
            raise ValueError("slice members must be pairwise causally unrelated")


def _check_region(site: CausalSite, region: Region) -> None:
    if region.site is not site:
        raise SiteMismatch("region belongs to a different site")


def _members_mask(site: CausalSite, region: Region) -> np.ndarray:
    mask = np.zeros(site.n, dtype=bool)
    mask[list(region.members)] = True
    return mask


def _mask_region(site: CausalSite, mask: np.ndarray) -> Region:
    return Region(site, frozenset(np.nonzero(mask)[0].tolist()))


# ----------------------------------------------------------------------
# Site constructors


def build_diamond_lattice(T: int, L: int, cone_slope: int = 2) -> CausalSite:
    """A (T+1) x (L+1) lattice with (t,x) < (t',x') iff t' > t and
    cone_slope * |x' - x| <= t' - t.

    Event ids are t * (L + 1) + x.  Slope >= 2 leaves room for non-flat
    acausal slices; slope 1 makes every unit diagonal lightlike.
    """
    if T < 1:
        raise ValueError("time extent T must be >= 1")
    if L < 0:
        raise ValueError("spatial extent L must be >= 0")
    if cone_slope < 1:
        raise ValueError("cone_slope must be >= 1")
    coords = [(t, x) for t in range(T + 1) for x in range(L + 1)]
    ts = np.array([c[0] for c in coords])
    xs = np.array([c[1] for c in coords])
    dt = ts[None, :] - ts[:, None]
    dx = np.abs(xs[None, :] - xs[:, None])
    rel = (dt > 0) & (cone_slope * dx <= dt)
    return CausalSite(rel, coords, cone_slope)


def build_random_site(n: int, edge_prob: float, rng: np.random.Generator) -> CausalSite:
    """A random DAG on n events (ids in topological order), transitively closed."""
    if n < 1:
        raise ValueError("need at least one event")
    covers = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                covers[i, j] = True
    return CausalSite(_transitive_closure(covers))


def build_random_sublattice(
    T: int, L: int, cone_slope: int, keep_prob: float, rng: np.random.Generator
) -> CausalSite:
    """A random induced sub-site of a diamond lattice, keeping coordinates."""
    full = build_diamond_lattice(T, L, cone_slope)
    keep = np.nonzero(rng.random(full.n) < keep_prob)[0]
    if keep.size == 0:
        keep = np.array([int(rng.integers(full.n))])
    rel = full.reach[np.ix_(keep, keep)]
    coords = [full.coords_of(int(i)) for i in keep]
    return CausalSite(rel, coords, cone_slope)


# ----------------------------------------------------------------------
# Cone queries


def causal_future(site: CausalSite, region: Region) -> Region:
    """J+(R): R plus everything reachable from R along the order."""
    _check_region(site, region)
    mask = _members_mask(site, region)
    out = mask | site.reach[mask].any(axis=0)
    return _mask_region(site, out)


def causal_past(site: CausalSite, region: Region) -> Region:
    """J-(R): R plus everything that reaches R."""
    _check_region(site, region)
    mask = _members_mask(site, region)
    out = mask | site.reach[:, mask].any(axis=1)
    return _mask_region(site, out)


def strict_causal_future(site: CausalSite, region: Region) -> Region:
    """J+(R) with R itself removed."""
    fut = causal_future(site, region)
    return Region(site, fut.members - region.members)


def strict_causal_past(site: CausalSite, region: Region) -> Region:
    pst = causal_past(site, region)
    return Region(site, pst.members - region.members)


def chronological_future(site: CausalSite, region: Region) -> Region:
    """I+(R): strict interior of the cone, lattice sites only.

    q is in I+(p) iff t_q > t_p and cone_slope * |x_q - x_p| < t_q - t_p.
    The timelike/null distinction needs coordinates, so non-lattice sites
    are rejected.
    """
    _check_region(site, region)
    site._require_coords()
    s = site.cone_slope
    out = np.zeros(site.n, dtype=bool)
    pts = [site.coords_of(m) for m in region.members]
    for q in range(site.n):
        tq, xq = site.coords_of(q)
        for (tp, xp) in pts:
            if tq > tp and s * abs(xq - xp) < tq - tp:
                out[q] = True
                break
    return _mask_region(site, out)


def chronological_past(site: CausalSite, region: Region) -> Region:
    _check_region(site, region)
    site._require_coords()
    s = site.cone_slope
    out = np.zeros(site.n, dtype=bool)
    pts = [site.coords_of(m) for m in region.members]
    for q in range(site.n):
        tq, xq = site.coords_of(q)
        for (tp, xp) in pts:
            if tq < tp and s * abs(xq - xp) < tp - tq:
                out[q] = True
                break
    return _mask_region(site, out)


# ----------------------------------------------------------------------
# Chains and domains of dependence


def longest_rank_down(site: CausalSite) -> np.ndarray:
    """Length (in edges) of the longest covering chain from a minimal event."""
    rank = np.full(site.n, -1, dtype=int)
    order = _topological_order(site)
    for q in order:
        preds = site.predecessors(q)
        rank[q] = 0 if not preds else 1 + max(rank[p] for p in preds)
    return rank


def longest_rank_up(site: CausalSite) -> np.ndarray:
    """Length of the longest covering chain up to a maximal event."""
    rank = np.full(site.n, -1, dtype=int)
    for q in reversed(_topological_order(site)):
        succs = site.successors(q)
        rank[q] = 0 if not succs else 1 + max(rank[s] for s in succs)
    return rank


def _topological_order(site: CausalSite) -> list[int]:
    indeg = site._covers.sum(axis=0).astype(int)
    ready = sorted(np.nonzero(indeg == 0)[0].tolist())
    out: list[int] = []
    indeg = indeg.copy()
    while ready:
        q = ready.pop(0)
        out.append(q)
        for s in site.successors(q):
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
        ready.sort()
    assert len(out) == site.n
    return out


def domain_of_dependence(
    site: CausalSite, region: Region, direction: str = "both"
) -> Region:
    """Discrete domain of dependence.

    Inextendible curves are rendered as maximum-length covering chains:
    p lies in D+(S) iff every longest chain that ends at p and starts at a
    minimal event of the site meets S.  D-(S) is the dual; D = D+ u D-.
    Longest chains advance one "moment" at a time, which is what makes a
    full-width slice determine everything above and below it.  The result
    depends on the site's own minimal/maximal events, a finite-volume
    artifact.
    """
    _check_region(site, region)
    if direction not in ("future", "past", "both"):
        raise ValueError("direction must be 'future', 'past' or 'both'")
    mask = _members_mask(site, region)
    out = np.zeros(site.n, dtype=bool)
    if direction in ("future", "both"):
        out |= _determined(site, mask, down=True)
    if direction in ("past", "both"):
        out |= _determined(site, mask, down=False)
    return _mask_region(site, out)


def _determined(site: CausalSite, smask: np.ndarray, down: bool) -> np.ndarray:
    rank = longest_rank_down(site) if down else longest_rank_up(site)
    neighbors = site.predecessors if down else site.successors
    ok = np.zeros(site.n, dtype=bool)
    order = _topological_order(site)
    for q in order if down else reversed(order):
        if smask[q]:
            ok[q] = True
            continue
        nbrs = neighbors(q)
        if not nbrs:
            ok[q] = False  # the one-event chain misses S
            continue
        on_longest = [p for p in nbrs if rank[p] == rank[q] - 1]
        ok[q] = all(ok[p] for p in on_longest)
    return ok


def is_cauchy_slice(site: CausalSite, region: Region) -> bool:
    """True iff the acausal region determines the whole site: D(S) = M.

    Raises on non-acausal input to distinguish caller error from an honest
    "not Cauchy" answer.
    """
    _check_region(site, region)
    if not is_acausal(site, region):
        raise ValueError("is_cauchy_slice requires an acausal region")
    dom = domain_of_dependence(site, region, "both")
    return len(dom.members) == site.n


# ----------------------------------------------------------------------
# Boundaries, acausality, spacelike separation


def future_boundary(site: CausalSite, region: Region) -> Region:
    """B+(R) = {p in R : J+(p) n R = {p}} -- members with no other member above."""
    _check_region(site, region)
    ids = region.sorted_ids()
    sub = site.reach[np.ix_(ids, ids)]
    keep = ~sub.any(axis=1)
    return Region(site, frozenset(ids[i] for i in np.nonzero(keep)[0]))


def past_boundary(site: CausalSite, region: Region) -> Region:
    _check_region(site, region)
    ids = region.sorted_ids()
    sub = site.reach[np.ix_(ids, ids)]
    keep = ~sub.any(axis=0)
    return Region(site, frozenset(ids[i] for i in np.nonzero(keep)[0]))


def is_acausal(site: CausalSite, region: Region) -> bool:
    _check_region(site, region)
    ids = region.sorted_ids()
    return not site.reach[np.ix_(ids, ids)].any()


def is_spacelike_separated(site: CausalSite, u: Region, v: Region) -> bool:
    """True iff (J+(U) u J-(U)) n V is empty.  Symmetric in U and V."""
    _check_region(site, u)
    _check_region(site, v)
    shadow = causal_future(site, u).members | causal_past(site, u).members
    return not (shadow & v.members)


def boundaries_overlap(site: CausalSite, region: Region) -> bool:
    """True iff B+(R) and B-(R) share events ("instantaneous" regions)."""
    return bool(
        future_boundary(site, region).members & past_boundary(site, region).members
    )


# ----------------------------------------------------------------------
# Isometries


@dataclass(frozen=True)
class Isometry:
    """A bijection on event ids preserving the order in both directions."""

    site: CausalSite
    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.mapping)
        object.__setattr__(self, "mapping", m)
        if sorted(m) != list(range(self.site.n)):
            raise NonIsometry("mapping is not a bijection on event ids")
        perm = np.array(m)
        permuted = self.site.reach[np.ix_(perm, perm)]
        if not np.array_equal(permuted, self.site.reach):
            raise NonIsometry("mapping does not preserve the causal order")

    def apply(self, region: Region) -> Region:
        _check_region(self.site, region)
        return Region(self.site, frozenset(self.mapping[m] for m in region.members))


def spatial_reflection(site: CausalSite) -> Isometry:
    """x -> L - x on a lattice site (an order isomorphism of the diamond)."""
    site._require_coords()
    xs = [c[1] for c in (site.coords_of(i) for i in range(site.n))]
    L = max(xs)
    mapping = [site.id_at(site.coords_of(i)[0], L - site.coords_of(i)[1]) for i in range(site.n)]
    return Isometry(site, tuple(mapping))


# ----------------------------------------------------------------------
# Structural verification reports


def verify_boundary_properties(site: CausalSite, region: Region) -> VerificationReport:
    """Check that both boundaries of a nonempty region are acausal.

    Compactness is automatic on a finite site and recorded as such.
    """
    _check_region(site, region)
    if not region.members:
        raise ValueError("region must be nonempty")
    violations = []
    sizes = {}
    for name, bnd in (
        ("future", future_boundary(site, region)),
        ("past", past_boundary(site, region)),
    ):
        ids = bnd.sorted_ids()
        sizes[name] = len(ids)
        for i, p in enumerate(ids):
            for q in ids[i + 1 :]:
                if site.precedes(p, q) or site.precedes(q, p):
                    violations.append((name, p, q))
    return VerificationReport(
        check="boundary_acausal",
        passed=not violations,
        evidence={
            "region_size": len(region),
            "future_boundary_size": sizes["future"],
            "past_boundary_size": sizes["past"],
            "violating_pairs": [list(v) for v in violations],
            "compact": True,  # finite site: every subset is closed and bounded
        },
        tolerances={},
    )


def verify_boundary_covariance(
    site: CausalSite, iso: Isometry, region: Region
) -> VerificationReport:
    """Check B+-(iso(R)) == iso(B+-(R)) as exact set equality."""
    if iso.site is not site:
        raise SiteMismatch("isometry belongs to a different site")
    _check_region(site, region)
    mapped = iso.apply(region)
    ok_future = future_boundary(site, mapped).members == iso.apply(
        future_boundary(site, region)
    ).members
    ok_past = past_boundary(site, mapped).members == iso.apply(
        past_boundary(site, region)
    ).members
    return VerificationReport(
        check="boundary_covariance",
        passed=ok_future and ok_past,
        evidence={
            "region_size": len(region),
            "future_equal": ok_future,
            "past_equal": ok_past,
        },
        tolerances={},
    )
