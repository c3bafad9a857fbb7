"""Boundary hitters, fiber candidates, region certificates, exact densities."""

from fractions import Fraction

import pytest

from odowin.fibers import (
    birkhoff_stats,
    boundary_hitters_exact,
    coverage_fraction,
    critical_point,
    enumerate_fiber,
    similarity_classes,
    t_region,
)
from odowin.model_sets import classify
from odowin.odometer import embed, odo_mul, sample_point
from odowin.windows import CLS_PENDING, boundary_measure


def close_pair(hitters_a, hitters_b, limit=8):
    """A pair (a, b), one from each list, with small positive difference."""
    best = None
    for a in hitters_a:
        for b in hitters_b:
            if a != b and abs(b - a) <= limit:
                if best is None or abs(b - a) < abs(best[1] - best[0]):
                    best = (a, b)
    assert best is not None, "no close pair available"
    return best


def test_critical_point_is_boundary(w_fiber, w_k):
    for win in (w_fiber, w_k[3]):
        xi = critical_point(win)
        assert classify(win, xi) == (CLS_PENDING, win.cap)


def test_haar_criticality_frequency(w_irr):
    # a random point stays on the boundary at the cap with probability nu(Z_cap)
    n = 400
    crit = sum(
        1
        for seed in range(n)
        if classify(w_irr, sample_point(w_irr.ds, seed, w_irr.cap))[0] == CLS_PENDING
    )
    p = float(boundary_measure(w_irr, w_irr.cap))
    sigma = (n * p * (1 - p)) ** 0.5
    assert abs(crit - n * p) <= 5 * sigma


def test_translated_criticality(w_fiber):
    # if xi is critical then so is every shifted copy, with a shifted hitter
    ds = w_fiber.ds
    xi = critical_point(w_fiber)
    for g in (7, 100):
        shifted = odo_mul(ds, embed(ds, g, w_fiber.cap), xi, w_fiber.cap)
        l = ds.head(ds.group.mul(ds.group.identity, ds.group.inv(g)), w_fiber.cap)
        orbit = odo_mul(ds, embed(ds, l, w_fiber.cap), shifted, w_fiber.cap)
        assert classify(w_fiber, orbit)[0] == CLS_PENDING


def test_hitter_count_is_exact(w_fiber, w_k):
    # shifting permutes cap-level cylinders: every point has exactly
    # #(boundary cylinders) hitters in the cap-level domain
    for win in (w_fiber, w_k[2]):
        for seed in (1, 2, 3):
            xi = sample_point(win.ds, seed, win.cap)
            hitters = boundary_hitters_exact(win, xi)
            assert len(hitters) == len(win.tree.pending_ranks[win.cap - 1])
            rep = similarity_classes(win, xi, win.ds.domain_list(win.cap))
            assert sorted(rep.hitters()) == sorted(g for g, _s in hitters)


def test_classes_respect_sectors(w_k):
    win = w_k[3]
    xi = sample_point(win.ds, 42, win.cap)
    rep = similarity_classes(win, xi, win.ds.domain_list(win.cap))
    by_sector = {}
    for g, s in boundary_hitters_exact(win, xi):
        by_sector.setdefault(s, []).append(g)
    for j in range(1, 4):
        assert sorted(rep.classes[j - 1]) == sorted(by_sector.get(j, []))


def test_small_patch_can_miss_classes(w_k):
    # classes are patch-relative: a small patch away from the hitters is empty
    win = w_k[2]
    xi = critical_point(win)
    hitters = {g for g, _ in boundary_hitters_exact(win, xi)}
    patch = [g for g in win.ds.domain_list(2) if g not in hitters][:10]
    rep = similarity_classes(win, xi, patch)
    assert all(len(c) == 0 for c in rep.classes)
    fib = enumerate_fiber(win, xi, patch)
    assert fib.distinct() == 1  # empty classes collapse every candidate


def test_perf_single_class_two_candidates(w_fiber):
    xi = critical_point(w_fiber)
    patch = w_fiber.ds.domain_list(w_fiber.cap)
    rep = similarity_classes(w_fiber, xi, patch)
    assert rep.k == 1 and len(rep.classes[0]) == 20
    fib = enumerate_fiber(w_fiber, xi, patch)
    assert len(fib.candidates) == 2 and fib.distinct() == 2
    a, b = fib.candidates
    differing = [g for g in patch if a.values[g] != b.values[g]]
    assert sorted(differing) == sorted(rep.classes[0])


def test_fiber_counts_and_chain(w_k):
    for k in (1, 2, 3):
        win = w_k[k]
        xi = sample_point(win.ds, 11, win.cap)
        patch = win.ds.domain_list(win.cap)
        fib = enumerate_fiber(win, xi, patch)
        assert fib.report.full_coverage()
        assert len(fib.candidates) == k + 1
        assert fib.distinct() == k + 1
        # candidates form a chain under coordinatewise comparison on hitters
        hitters = fib.report.hitters()
        for a, b in zip(fib.candidates, fib.candidates[1:]):
            assert all(a.values[g] >= b.values[g] for g in hitters)
        # monotone determination: a one at some class forces ones above it
        for cand in fib.candidates:
            for j, cls in enumerate(fib.report.classes, start=1):
                for higher in fib.report.classes[j:]:
                    if any(cand.values[g] == 1 for g in cls):
                        assert all(cand.values[g] == 1 for g in higher)


def test_ktilde_fiber_growth(w_kt):
    win = w_kt[3]
    sizes = []
    for level in (4, 5, 6):
        xi = sample_point(win.ds, 23, win.cap)
        patch = win.ds.domain_list(level)
        fib = enumerate_fiber(win, xi, patch)
        top = fib.report.classes[-1]
        assert len(fib.candidates) == (win.spec.k + 1) + len(top)
        assert fib.distinct() == len(fib.candidates) if top else True
        sizes.append(len(fib.candidates))
    assert sizes[0] <= sizes[1] <= sizes[2]
    assert sizes[2] == 4 + 12  # full patch sees the whole top class


def test_ktilde_atoms_and_pairwise_difference(w_kt):
    win = w_kt[2]
    xi = sample_point(win.ds, 5, win.cap)
    patch = win.ds.domain_list(win.cap)
    fib = enumerate_fiber(win, xi, patch)
    assert fib.report.atoms == fib.report.classes[-1]
    k = win.spec.k
    base = fib.candidates[k - 1]  # the candidate keeping the whole top class
    for cand, l in zip(fib.candidates[k + 1 :], fib.report.classes[-1]):
        diff = [g for g in patch if cand.values[g] != base.values[g]]
        assert diff == [l] and cand.values[l] == 0


def test_t_region_trivial_and_ball(w_k):
    win = w_k[2]
    xi = critical_point(win)
    res = t_region(win, [], [], xi, 3)
    ball = 1
    for j in range(4, win.cap + 1):
        ball *= len(win.ds.alphabet(j))
    assert len(res.certificates) == ball  # empty constraints: the whole ball


def test_t_region_perf_same_class_empty(w_fiber):
    xi = critical_point(w_fiber)
    hitters = [g for g, _ in boundary_hitters_exact(w_fiber, xi)]
    a, b = close_pair(hitters, hitters)
    for eps in (2, 3, 4):
        for accept, reject in ((a, b), (b, a)):
            res = t_region(w_fiber, [accept], [reject], xi, eps)
            assert res.certificates == []
            assert res.mismatched_undecided == 0
            assert res.empty_certified


def test_t_region_cross_class_order(w_k):
    for k in (2, 3):
        win = w_k[k]
        xi = critical_point(win)
        by_sector = {}
        for g, s in boundary_hitters_exact(win, xi):
            by_sector.setdefault(s, []).append(g)
        for low, high in ((1, 2), (1, k), (k - 1, k)):
            if low == high:
                continue
            l_low, l_high = close_pair(by_sector[low], by_sector[high], limit=16)
            for eps in (2, 3):
                fw = t_region(win, [l_high], [l_low], xi, eps)
                bw = t_region(win, [l_low], [l_high], xi, eps)
                assert fw.certificates, (k, low, high, eps)
                assert bw.certificates == [] and bw.empty_certified


def test_birkhoff_census(w_k):
    win = w_k[3]
    for xi in (embed(win.ds, 0, win.cap), sample_point(win.ds, 3, win.cap)):
        stats = birkhoff_stats(win, xi, range(1, win.cap + 1))
        for n, row in stats.items():
            assert row["census_match"]
            # frequencies add to one
            freq_out = 1 - row["freq_interior"] - row["freq_boundary"]
            assert 0 <= freq_out <= 1
            dens = row["candidate_density"]
            if n >= win.spec.sector_level:
                assert all(a > b for a, b in zip(dens, dens[1:]))
                for j in range(1, win.spec.k + 1):
                    assert dens[j - 1] - dens[j] == row["sector_freq"][j]


def test_coverage_full_at_cap_patch(w_k):
    win = w_k[3]
    frac, reports = coverage_fraction(win, win.ds.domain_list(win.cap), range(25))
    assert frac == 1
    assert all(r.full_coverage() for r in reports)
