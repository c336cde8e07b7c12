"""Discrete Cauchy time functions and the order-swapping foliation pair.

A foliation assigns every event an integer level, strictly increasing along
the causal order, so each level set is acausal and the level sets partition
the site.  ``build_two_foliations`` produces two such gradings for a
spacelike-separated region pair: one contains a middle slice that lies
strictly after the first region but strictly before the second, the other
contains the mirrored slice, and both share a common bottom and top level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoFoliationFound, NotSpacelike, SiteMismatch
from .reports import VerificationReport
from .site import (
    CausalSite,
    Region,
    causal_future,
    causal_past,
    is_spacelike_separated,
    longest_rank_down,
    longest_rank_up,
    _check_region,
)


@dataclass(frozen=True)
class Foliation:
    """An integer level per event, strictly monotone along the causal order."""

    site: CausalSite
    levels: tuple[int, ...]

    def __post_init__(self):
        lv = tuple(int(v) for v in self.levels)
        object.__setattr__(self, "levels", lv)
        if len(lv) != self.site.n:
            raise SiteMismatch("one level per event required")
        for p, q in self.site.cover_pairs:
            if lv[p] >= lv[q]:
                raise ValueError(f"levels not monotone on causal pair {p} < {q}")
        present = sorted(set(lv))
        if present != list(range(len(present))) or present[0] != 0:
            raise ValueError("levels must be the contiguous range 0..max, all nonempty")

    @property
    def num_levels(self) -> int:
        return max(self.levels) + 1

    def level_set(self, k: int) -> frozenset[int]:
        return frozenset(i for i, lv in enumerate(self.levels) if lv == k)

    def level_sets(self) -> list[frozenset[int]]:
        return [self.level_set(k) for k in range(self.num_levels)]

    def level_of(self, event_id: int) -> int:
        return self.levels[event_id]


def build_flat_foliation(site: CausalSite) -> Foliation:
    """Grade by longest-chain rank; on a full diamond lattice this is t."""
    return Foliation(site, tuple(longest_rank_down(site).tolist()))


@dataclass(frozen=True)
class TwoFoliations:
    """Order-swapping pair: ``first`` sees U fire before V, ``second`` V before U."""

    first: Foliation
    second: Foliation
    first_mid_level: int
    second_mid_level: int

    def shared_bottom(self) -> frozenset[int]:
        return self.first.level_set(0)

    def shared_top(self) -> frozenset[int]:
        return self.first.level_set(self.first.num_levels - 1)


def order_predicates(
    site: CausalSite,
    fol: Foliation,
    mid_level: int,
    before: Region,
    after: Region,
) -> dict[str, bool]:
    """The eight intersection predicates for one foliation of the pair.

    The middle slice must meet J+(before), avoid J-(before), avoid
    J+(after) and meet J-(after); the bottom level must avoid the causal
    future of both regions and the top level the causal past of both.
    """
    mid = fol.level_set(mid_level)
    bottom = fol.level_set(0)
    top = fol.level_set(fol.num_levels - 1)
    jp_b = causal_future(site, before).members
    jm_b = causal_past(site, before).members
    jp_a = causal_future(site, after).members
    jm_a = causal_past(site, after).members
    return {
        "mid_meets_future_of_first": bool(mid & jp_b),
        "mid_avoids_past_of_first": not (mid & jm_b),
        "mid_avoids_future_of_second": not (mid & jp_a),
        "mid_meets_past_of_second": bool(mid & jm_a),
        "bottom_avoids_future_of_first": not (bottom & jp_b),
        "bottom_avoids_future_of_second": not (bottom & jp_a),
        "top_avoids_past_of_first": not (top & jm_b),
        "top_avoids_past_of_second": not (top & jm_a),
    }


def build_two_foliations(site: CausalSite, u: Region, v: Region) -> TwoFoliations:
    """Two foliations that realise both firing orders for spacelike U, V.

    On full diamond lattices the middle slices are tilted graph slices
    obtained from a Lipschitz envelope between the regions' cone shadows;
    on general sites a witness pair of incomparable events is promoted to a
    two-event middle slice.  Both foliations share the site's minimal
    events as bottom level and its maximal events as top level.  Raises
    NotSpacelike or NoFoliationFound (small or degenerate sites) rather
    than returning a wrong answer.
    """
    _check_region(site, u)
    _check_region(site, v)
    if not u.members or not v.members:
        raise ValueError("both regions must be nonempty")
    if not is_spacelike_separated(site, u, v):
        raise NotSpacelike("regions are not spacelike-separated")

    if _is_full_lattice(site):
        try:
            f1, m1 = _lattice_foliation(site, u, v)
            f2, m2 = _lattice_foliation(site, v, u)
        except NoFoliationFound:
            # full-width tilted slices may not fit where a partial-width
            # middle slice still does
            f1, m1 = _generic_foliation(site, u, v)
            f2, m2 = _generic_foliation(site, v, u)
    else:
        f1, m1 = _generic_foliation(site, u, v)
        f2, m2 = _generic_foliation(site, v, u)

    pair = TwoFoliations(f1, f2, m1, m2)
    for fol, mid, before, after in ((f1, m1, u, v), (f2, m2, v, u)):
        preds = order_predicates(site, fol, mid, before, after)
        if not all(preds.values()):
            bad = sorted(k for k, ok in preds.items() if not ok)
            raise NoFoliationFound(f"constructed foliation violates {bad}")
    if pair.shared_bottom() != f2.level_set(0) or pair.shared_top() != f2.level_set(
        f2.num_levels - 1
    ):
        raise NoFoliationFound("foliations do not share bottom and top slices")
    return pair


def two_foliation_report(site: CausalSite, u: Region, v: Region) -> VerificationReport:
    """Build the pair and report all sixteen predicates explicitly."""
    try:
        pair = build_two_foliations(site, u, v)
    except (NotSpacelike, NoFoliationFound) as exc:
        return VerificationReport(
            check="two_foliations",
            passed=False,
            evidence={"error": type(exc).__name__, "message": str(exc)},
            tolerances={},
        )
    p1 = order_predicates(site, pair.first, pair.first_mid_level, u, v)
    p2 = order_predicates(site, pair.second, pair.second_mid_level, v, u)
    return VerificationReport(
        check="two_foliations",
        passed=all(p1.values()) and all(p2.values()),
        evidence={
            "first_order": p1,
            "second_order": p2,
            "first_levels": pair.first.num_levels,
            "second_levels": pair.second.num_levels,
            "first_level_map": list(pair.first.levels),
            "second_level_map": list(pair.second.levels),
            "first_mid_level": pair.first_mid_level,
            "second_mid_level": pair.second_mid_level,
            "shared_bottom_size": len(pair.shared_bottom()),
            "shared_top_size": len(pair.shared_top()),
        },
        tolerances={},
    )


# ----------------------------------------------------------------------
# Lattice construction: tilted graph slices


def _is_full_lattice(site: CausalSite) -> bool:
    if not site.has_coords:
        return False
    coords = [site.coords_of(i) for i in range(site.n)]
    ts = [c[0] for c in coords]
    xs = [c[1] for c in coords]
    T, L = max(ts), max(xs)
    return site.n == (T + 1) * (L + 1) and len(set(coords)) == site.n and min(ts) == 0 and min(xs) == 0


def _lattice_foliation(
    site: CausalSite, before: Region, after: Region
) -> tuple[Foliation, int]:
    """A grading whose middle level is a full-width slice strictly after
    ``before`` and strictly before ``after``."""
    s = site.cone_slope
    coords = [site.coords_of(i) for i in range(site.n)]
    T = max(c[0] for c in coords)
    L = max(c[1] for c in coords)
    b_pts = [site.coords_of(m) for m in before.members]
    a_pts = [site.coords_of(m) for m in after.members]

    # Column-wise shadows: past cone top of `before`, future cone bottom of `after`.
    xs = np.arange(L + 1)
    past_top = np.max(
        [[tb - s * abs(int(x) - xb) for x in xs] for tb, xb in b_pts], axis=0
    )
    future_bottom = np.min(
        [[ta + s * abs(int(x) - xa) for x in xs] for ta, xa in a_pts], axis=0
    )
    lo = np.maximum(past_top + 1, 1)
    hi = np.minimum(future_bottom - 1, T - 1)

    # Largest (s-1)-Lipschitz slice within the band; Lipschitz keeps it acausal.
    h = hi.astype(int).copy()
    for x in range(1, L + 1):
        h[x] = min(h[x], h[x - 1] + (s - 1))
    for x in range(L - 1, -1, -1):
        h[x] = min(h[x], h[x + 1] + (s - 1))
    if np.any(h < lo):
        raise NoFoliationFound(
            "no acausal slice fits between the regions on this lattice"
        )

    hmax = int(h.max())
    upper_ts = [t for t in range(T) for x in range(L + 1) if h[x] < t <= T - 1]
    t_min_upper = min(upper_ts) if upper_ts else None

    levels = []
    for (t, x) in coords:
        if t == 0:
            levels.append(0)
        elif t == T:
            if t_min_upper is None:
                levels.append(hmax + 1)
            else:
                levels.append(hmax + (T - 1 - t_min_upper + 1) + 1)
        elif t < h[x]:
            levels.append(t)
        elif t == h[x]:
            levels.append(hmax)
        else:
            levels.append(hmax + (t - t_min_upper + 1))
    return Foliation(site, tuple(levels)), hmax


# ----------------------------------------------------------------------
# Generic construction: witness pair plus block grading


def _generic_foliation(
    site: CausalSite, before: Region, after: Region
) -> tuple[Foliation, int]:
    minimals = site.minimal_ids()
    maximals = site.maximal_ids()
    if minimals & maximals:
        raise NoFoliationFound("site has isolated events; no shared extreme slices")

    jp_b = causal_future(site, before).members
    jm_b = causal_past(site, before).members
    jp_a = causal_future(site, after).members
    jm_a = causal_past(site, after).members
    allowed = frozenset(range(site.n)) - jm_b - jp_a - minimals - maximals
    w1s = sorted(allowed & jp_b)
    w2s = sorted(allowed & jm_a)
    for w1 in w1s:
        for w2 in w2s:
            if w1 == w2 or site.precedes(w1, w2) or site.precedes(w2, w1):
                continue
            try:
                return _grade_around(site, frozenset((w1, w2)))
            except NoFoliationFound:
                continue
    raise NoFoliationFound("no incomparable witness pair separates the regions")


def _grade_around(site: CausalSite, mid: frozenset[int]) -> tuple[Foliation, int]:
    """Grade the site with ``mid`` as one level, minimal events at the bottom
    and maximal events at the top."""
    strict_future = causal_future(site, Region(site, mid)).members - mid
    upper = strict_future | site.maximal_ids()
    if upper & mid:
        raise NoFoliationFound("middle slice touches a maximal event")
    lower = frozenset(range(site.n)) - mid - upper

    rank_down = longest_rank_down(site)
    rank_up = longest_rank_up(site)

    # Lower block by chain rank within the (down-closed) lower set.
    low_ids = sorted(lower)
    low_rank = {}
    for q in sorted(low_ids, key=lambda i: rank_down[i]):
        preds = [p for p in site.predecessors(q) if p in lower]
        low_rank[q] = 0 if not preds else 1 + max(low_rank[p] for p in preds)
    n_low = 1 + max(low_rank.values()) if low_rank else 0

    # Upper block by co-rank so every maximal event lands on the top level.
    up_rank = {}
    for q in sorted(upper, key=lambda i: rank_up[i]):
        succs = [p for p in site.successors(q) if p in upper]
        up_rank[q] = 0 if not succs else 1 + max(up_rank[p] for p in succs)
    n_up = 1 + max(up_rank.values()) if up_rank else 0

    levels = np.zeros(site.n, dtype=int)
    for q in lower:
        levels[q] = low_rank[q]
    mid_level = n_low
    for q in mid:
        levels[q] = mid_level
    for q in upper:
        levels[q] = mid_level + 1 + (n_up - 1 - up_rank[q])

    # Compact to a contiguous range (blocks can leave gaps on thin sites).
    used = np.unique(levels)
    remap = {int(old): new for new, old in enumerate(used)}
    levels = np.array([remap[int(lv)] for lv in levels])
    return Foliation(site, tuple(levels.tolist())), remap[mid_level]
