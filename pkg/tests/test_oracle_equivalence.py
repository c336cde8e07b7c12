"""Every causal query must agree with the chain/pair-enumeration oracle."""

import numpy as np

import causalq as cq
from causalq import Region

from brute import SiteOracle


def random_regions(site, rng, count=6):
    out = [frozenset()]
    for _ in range(count):
        size = int(rng.integers(1, max(2, site.n // 2)))
        out.append(frozenset(int(i) for i in rng.choice(site.n, size, replace=False)))
    out.append(frozenset(range(site.n)))
    return out


def check_site_against_oracle(site, rng):
    oracle = SiteOracle(site)
    regions = random_regions(site, rng)
    for members in regions:
        r = Region(site, members)
        assert cq.causal_future(site, r).members == oracle.causal_future(members)
        assert cq.causal_past(site, r).members == oracle.causal_past(members)
        assert (
            cq.strict_causal_future(site, r).members
            == oracle.strict_causal_future(members)
        )
        assert (
            cq.strict_causal_past(site, r).members
            == oracle.strict_causal_past(members)
        )
        assert cq.future_boundary(site, r).members == oracle.future_boundary(members)
        assert cq.past_boundary(site, r).members == oracle.past_boundary(members)
        assert cq.is_acausal(site, r) == oracle.is_acausal(members)
        for direction in ("future", "past", "both"):
            assert (
                cq.domain_of_dependence(site, r, direction).members
                == oracle.domain(members, direction)
            ), (members, direction)
        if site.has_coords:
            assert (
                cq.chronological_future(site, r).members
                == oracle.chronological_future(members)
            )
            assert (
                cq.chronological_past(site, r).members
                == oracle.chronological_past(members)
            )
    for u in regions[:4]:
        for v in regions[:4]:
            ru, rv = Region(site, u), Region(site, v)
            got = cq.is_spacelike_separated(site, ru, rv)
            assert got == oracle.is_spacelike(u, v)
            assert got == cq.is_spacelike_separated(site, rv, ru)
    # acausal candidates: boundaries and foliation level sets
    for members in regions:
        if not members:
            continue
        b = cq.future_boundary(site, Region(site, members))
        assert cq.is_cauchy_slice(site, b) == oracle.is_cauchy(b.members)
    for level_set in cq.build_flat_foliation(site).level_sets():
        r = Region(site, level_set)
        assert cq.is_cauchy_slice(site, r) == oracle.is_cauchy(level_set)


def test_random_posets_match_oracle():
    rng = np.random.default_rng(42)
    for _ in range(10):
        n = int(rng.integers(4, 25))
        site = cq.build_random_site(n, float(rng.uniform(0.1, 0.4)), rng)
        check_site_against_oracle(site, rng)


def test_random_sublattices_match_oracle():
    rng = np.random.default_rng(43)
    for _ in range(6):
        site = cq.build_random_sublattice(5, 4, 2, 0.7, rng)
        check_site_against_oracle(site, rng)


def test_diamond_lattices_match_oracle():
    rng = np.random.default_rng(44)
    for T, L in ((4, 2), (5, 5), (6, 3)):
        check_site_against_oracle(cq.build_diamond_lattice(T, L, 2), rng)
    check_site_against_oracle(cq.build_diamond_lattice(4, 3, 1), rng)
    check_site_against_oracle(cq.build_diamond_lattice(6, 2, 3), rng)


def test_chronological_inside_causal_on_lattices():
    rng = np.random.default_rng(45)
    site = cq.build_diamond_lattice(6, 4, 2)
    for members in random_regions(site, rng):
        r = Region(site, members)
        assert (
            cq.chronological_future(site, r).members
            <= cq.causal_future(site, r).members
        )
