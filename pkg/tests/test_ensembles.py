from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apollokit.configs import DescartesConfig, seed_integral_n2, seed_polystrip
from apollokit.ensembles import (check_packing, curvature_spectrum, distinct_sphere_rows,
                                 expected_s_primes, generate_orbit, geometric_dedup,
                                 oracle_curvature_vectors, orbit_from_json, orbit_to_json,
                                 s_integrality_report, scalar_step, spectrum_to_csv)
from apollokit.errors import RepresentationError, ResourceLimitExceeded
from apollokit.groups import APOLLONIAN, DUAL, GenSymbol, Word, word_to_matrix


def test_depth_zero_is_seed():
    seed = seed_polystrip(3)
    o = generate_orbit(seed, depth=0)
    assert len(o) == 1
    assert np.array_equal(o.elements[0][1].W, seed.W)
    assert len(o.elements[0][0].letters) == 0


def test_depth_one_matches_scalar_recurrence():
    seed = seed_polystrip(3)
    o = generate_orbit(seed, depth=1)
    assert len(o) == 1 + 5
    words = [w for w, _ in o.elements]
    expect = oracle_curvature_vectors(seed.curvatures(), words, 3)
    assert [tuple(c.curvatures()) for _, c in o.elements] == expect


def test_configs_equal_matrix_times_seed():
    seed = seed_polystrip(4)
    o = generate_orbit(seed, depth=2)
    for w, cfg in o.elements:
        expect = seed.act_left(word_to_matrix(w))
        assert np.allclose(cfg.W, expect.W, atol=1e-9)
        assert cfg.curvatures() == expect.curvatures()


def test_integral_seed_stays_integral():
    o = generate_orbit(seed_integral_n2(), depth=3)
    for _, cfg in o.elements:
        assert all(Fraction(c).denominator == 1 for c in cfg.curvatures())
    assert s_integrality_report(o) == frozenset()


def test_spectrum_of_seed():
    values = curvature_spectrum(generate_orbit(seed_polystrip(3), depth=0))
    assert sorted(values) == sorted(seed_polystrip(3).curvatures())
    assert len(values) == 5


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_denominator_primes_within_expected(n):
    o = generate_orbit(seed_polystrip(n), depth=2 if n < 6 else 1)
    assert s_integrality_report(o) <= expected_s_primes(n)


def test_expected_primes_values():
    assert expected_s_primes(3) == frozenset()
    assert expected_s_primes(4) == {3}
    assert expected_s_primes(6) == {5}
    assert expected_s_primes(7) == {3}
    assert expected_s_primes(11) == {5}


@pytest.mark.parametrize("n", [3, 4, 5])
def test_no_stabilizer_collisions(n):
    o = generate_orbit(seed_polystrip(n), depth=3 if n == 3 else 2)
    assert o.stabilizer_collisions == 0


def test_apollonian_packing_has_no_crossing():
    o = generate_orbit(seed_polystrip(3), depth=2)
    rep = check_packing(o)
    assert rep.crossing == 0
    assert rep.crossing_examples == []
    assert rep.unchecked == 0
    assert sum(rep.counts.values()) == rep.pairs


def test_super_orbit_has_crossings_reported():
    o = generate_orbit(seed_polystrip(3), group="super", depth=2)
    rep = check_packing(o, max_examples=3)
    if rep.crossing:
        assert 1 <= len(rep.crossing_examples) <= 3


def test_resource_limit():
    with pytest.raises(ResourceLimitExceeded):
        generate_orbit(seed_polystrip(3), depth=5, max_elements=20)


def test_unknown_group():
    with pytest.raises(ValueError):
        generate_orbit(seed_polystrip(3), group="modular", depth=1)


def test_negative_depth():
    with pytest.raises(ValueError):
        generate_orbit(seed_polystrip(3), depth=-1)


def test_float_orbit_refuses_integrality_report():
    seed = seed_polystrip(3)
    fseed = DescartesConfig(3, seed.to_numpy(), "float", seed.orientation)
    o = generate_orbit(fseed, depth=1)
    assert not o.exact
    with pytest.raises(RepresentationError):
        s_integrality_report(o)


def test_json_round_trip():
    o = generate_orbit(seed_polystrip(3), group="dual", depth=2)
    back = orbit_from_json(orbit_to_json(o))
    assert back.group == o.group and back.depth == o.depth
    assert [str(w) for w, _ in back.elements] == [str(w) for w, _ in o.elements]
    assert all(np.allclose(a.to_numpy(), b.to_numpy()) for (_, a), (_, b) in zip(back.elements, o.elements))


def test_csv_format():
    text = spectrum_to_csv([Fraction(1, 2), 1, 1, Fraction(1, 2), 3])
    lines = text.strip().split("\n")
    assert lines[0] == "curvature,multiplicity"
    assert lines[1:] == ["1/2,2", "1,2", "3,1"]


def test_unoriented_rows_not_more_than_oriented():
    o = generate_orbit(seed_polystrip(3), group="dual", depth=2)
    assert len(distinct_sphere_rows(o, oriented=False)) <= len(distinct_sphere_rows(o))


def test_geometric_dedup_is_subset():
    o = generate_orbit(seed_polystrip(3), depth=2)
    g = geometric_dedup(o)
    assert 1 <= len(g) <= len(o)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 6),
       st.lists(st.tuples(st.sampled_from([APOLLONIAN, DUAL]), st.integers(1, 8)),
                min_size=1, max_size=6))
def test_scalar_step_matches_matrix(n, raw):
    letters = [GenSymbol(k, 1 + (j - 1) % (n + 2)) for k, j in raw]
    seed = seed_polystrip(n)
    b = list(seed.curvatures())
    for g in reversed(letters):
        b = scalar_step(g, b, n)
    moved = seed.act_left(word_to_matrix(Word(tuple(letters), n)))
    assert tuple(b) == tuple(moved.curvatures())
