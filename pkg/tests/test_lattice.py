import json
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from walklemma.baselines import LATTICE_DEGREE, nonbacktracking_symmetric_bound
from walklemma.lattice import (CUBIC, HEXAGONAL, LATTICES, SQUARE, FilterPattern,
                               PatternFormatError, ball, build_lattice_automaton, canonical_site,
                               finite_patch, finite_patch_crosscheck, format_pattern,
                               get_lattice, lattice_bound, load_pattern, parse_pattern,
                               patch_filters, preset_pattern, self_bounding_lattice_walks,
                               walk_letters)
from walklemma.solver import check_certificate
from walklemma.walks import StateBudgetExceeded, is_walk_accepted

SPECS = [SQUARE, CUBIC, HEXAGONAL]


def sites(spec, radius=4):
    return st.sampled_from(sorted(ball(spec, radius), key=spec.key))


# -- geometry -----------------------------------------------------------------

@pytest.mark.parametrize("spec", SPECS)
def test_neighbours_are_symmetric(spec):
    for s in ball(spec, 3):
        nb = spec.neighbors(s)
        assert len(nb) == spec.degree() == LATTICE_DEGREE[spec.kind]
        assert all(s in spec.neighbors(t) for t in nb)


@pytest.mark.parametrize("spec", SPECS)
@given(data=st.data())
def test_canonical_site_is_idempotent(spec, data):
    s = data.draw(sites(spec))
    o, shift = canonical_site(spec, s)
    assert spec.is_translation(shift)
    assert tuple(a + b for a, b in zip(s, shift)) == o
    assert canonical_site(spec, o) == (o, tuple(0 for _ in o))


@given(data=st.data())
def test_hexagonal_cells_round_trip(data):
    s = data.draw(sites(HEXAGONAL))
    cell, sub = HEXAGONAL.to_cell(s)
    assert HEXAGONAL.from_cell(cell, sub) == s


@pytest.mark.parametrize("spec", SPECS)
@given(data=st.data())
def test_pattern_canonicalisation(spec, data):
    base = list(data.draw(st.sets(sites(spec, 2), min_size=1, max_size=6)))
    pat = FilterPattern.build(spec, [base])
    assert FilterPattern.build(spec, pat.patterns) == pat
    # any lattice translate describes the same family
    shift = data.draw(sites(spec, 3))
    o, to_origin = canonical_site(spec, shift)
    moved = [tuple(a - b for a, b in zip(x, to_origin)) for x in base]
    assert spec.is_translation(tuple(-c for c in to_origin))
    assert FilterPattern.build(spec, [moved]) == pat


def test_get_lattice():
    assert get_lattice("Square") is SQUARE
    with pytest.raises(ValueError):
        get_lattice("kagome")


# -- automata -----------------------------------------------------------------

def test_square_empty_pattern():
    a = build_lattice_automaton(SQUARE, preset_pattern(SQUARE, "none"))
    assert a.num_classes == 1
    assert len(a.successors(0)) == 4 and set(a.successors(0).tolist()) == {0}
    rep, _, _ = lattice_bound(SQUARE)
    assert rep.lam == pytest.approx(0.08192, abs=1e-6)
    assert rep.certificate_ok


@pytest.mark.parametrize("spec", SPECS)
def test_edge_pattern_matches_nonbacktracking(spec):
    rep, a, lb = lattice_bound(spec, preset_pattern(spec, "edges"))
    assert rep.lam == pytest.approx(nonbacktracking_symmetric_bound(spec.degree()), abs=1e-6)
    assert check_certificate(a, rep.lam, lb.certificate)


def test_square_edges_fixed_values():
    assert lattice_bound(SQUARE, preset_pattern(SQUARE, "edges"))[0].lam == pytest.approx(27 / 256, abs=1e-6)
    assert lattice_bound(HEXAGONAL, preset_pattern(HEXAGONAL, "edges"))[0].lam == pytest.approx(4 / 27, abs=1e-6)


def test_square_edges_non_start_classes_have_three_successors():
    a = build_lattice_automaton(SQUARE, preset_pattern(SQUARE, "edges"))
    starts = set(a.start.tolist())
    for c in range(a.num_classes):
        if c not in starts:
            assert len(a.successors(c)) == 3


@pytest.mark.parametrize("spec, name", [(SQUARE, "ball:2"), (HEXAGONAL, "ball:2"), (CUBIC, "neighborhoods")])
def test_automaton_structure(spec, name):
    a = build_lattice_automaton(spec, preset_pattern(spec, name))
    assert a.is_deterministic()
    assert a.reachable().all()
    assert len(np.unique(a.rows, axis=0)) == a.num_classes
    assert a.fingerprint() == build_lattice_automaton(spec, preset_pattern(spec, name)).fingerprint()


def test_budget():
    with pytest.raises(StateBudgetExceeded):
        build_lattice_automaton(SQUARE, preset_pattern(SQUARE, "ball:2"), budget=10)
    with pytest.raises(ValueError):
        build_lattice_automaton(SQUARE, preset_pattern(HEXAGONAL, "edges"))


def test_window_monotonicity():
    pat = preset_pattern(SQUARE, "ball:2")
    bounds = [lattice_bound(SQUARE, pat, window=w)[0].lam for w in (0, 1, 2, 3, None)]
    assert all(b2 >= b1 - 1e-6 for b1, b2 in zip(bounds, bounds[1:])), bounds
    # zero window forgets every filter
    assert bounds[0] == pytest.approx(0.08192, abs=1e-6)


@pytest.mark.parametrize("spec", [SQUARE, HEXAGONAL])
def test_pattern_monotonicity(spec):
    edges = preset_pattern(spec, "edges")
    nbhd = preset_pattern(spec, "neighborhoods")
    both = FilterPattern.build(spec, edges.patterns + nbhd.patterns)
    b_e = lattice_bound(spec, edges)[0].lam
    b_n = lattice_bound(spec, nbhd)[0].lam
    b_both = lattice_bound(spec, both)[0].lam
    assert b_both >= max(b_e, b_n) - 1e-6


def test_walk_letters():
    w = [(0, 0), (1, 0), (1, 1)]
    letters = walk_letters(SQUARE, w)
    assert letters[0] == 0 and len(letters) == 3
    with pytest.raises(ValueError):
        walk_letters(SQUARE, [(0, 0), (2, 0)])


# -- finite patches -----------------------------------------------------------

@pytest.mark.parametrize("name", ["none", "edges"])
def test_square_patch_acceptance(name):
    rep = finite_patch_crosscheck(SQUARE, preset_pattern(SQUARE, name), radius=2, walk_len=8)
    assert rep.walks_checked > 0
    assert rep.acceptance_mismatches == 0
    assert rep.ok


def test_hexagonal_patch_bound_below_exact():
    rep = finite_patch_crosscheck(HEXAGONAL, preset_pattern(HEXAGONAL, "edges"), radius=2)
    assert rep.patch_lambda_c is not None
    assert rep.lattice_bound <= rep.patch_lambda_c
    assert rep.ok


def test_patch_acceptance_larger_pattern():
    rep = finite_patch_crosscheck(SQUARE, preset_pattern(SQUARE, "neighborhoods"), radius=4,
                                  walk_len=6, exact_cap=0)
    assert rep.acceptance_mismatches == 0


@pytest.mark.parametrize("spec", SPECS)
def test_self_bounding_walks_are_accepted(spec):
    pat = preset_pattern(spec, "neighborhoods")
    a = build_lattice_automaton(spec, pat)
    for w in self_bounding_lattice_walks(spec, 1):
        assert a.accepts_sites(spec, w)


def test_lattice_automaton_agrees_with_patch_checker_on_random_walks():
    spec = SQUARE
    pat = preset_pattern(spec, "ball:2")
    a = build_lattice_automaton(spec, pat)
    g, patch_sites = finite_patch(spec, 9)
    pos = {s: i for i, s in enumerate(patch_sites)}
    fams = patch_filters(spec, pat, patch_sites)
    rng = random.Random(5)
    inner = ball(spec, 4)
    for _ in range(150):
        w = [spec.origin(0)]
        for _ in range(rng.randint(0, 8)):
            nxt = [t for t in spec.neighbors(w[-1]) if t in inner]
            w.append(rng.choice(nxt))
        assert a.accepts_sites(spec, w) == is_walk_accepted([pos[s] for s in w], g, fams)


# -- pattern files ------------------------------------------------------------

@pytest.mark.parametrize("spec, name", [(SQUARE, "ball:2"), (CUBIC, "box:2x2x1"),
                                        (HEXAGONAL, "ball:2"), (HEXAGONAL, "edges")])
def test_pattern_round_trip(spec, name):
    pat = preset_pattern(spec, name)
    assert parse_pattern(format_pattern(pat)) == pat


def test_pattern_file_and_load(tmp_path):
    f = tmp_path / "edge.txt"
    f.write_text("lattice=square\n(0,0) (1,0)\n(0,0) (0,1)\n")
    assert load_pattern(SQUARE, str(f)) == preset_pattern(SQUARE, "edges")
    with pytest.raises(PatternFormatError):
        load_pattern(CUBIC, str(f))
    hexf = tmp_path / "hex.txt"
    hexf.write_text("lattice=hexagonal\n(0,0):0 (0,0):1\n")
    assert len(load_pattern(HEXAGONAL, str(hexf)).patterns) == 1


@pytest.mark.parametrize("text", [
    "", "(0,0)\n", "lattice=kagome\n(0,0)\n", "lattice=square\n(0,0,0)\n",
    "lattice=square\n(0,0) junk\n", "lattice=square\nnothing\n",
    "lattice=hexagonal\n(0,0):2\n", "lattice=square\n(0,0):1\n",
])
def test_pattern_parse_errors(text):
    with pytest.raises(PatternFormatError):
        parse_pattern(text)


def test_preset_names():
    assert preset_pattern(SQUARE, "headline").patterns == preset_pattern(SQUARE, "ball:3").patterns
    assert len(preset_pattern(CUBIC, "box:3x3x2").patterns) == 3
    with pytest.raises(ValueError):
        preset_pattern(SQUARE, "blob")
    with pytest.raises(ValueError):
        preset_pattern(HEXAGONAL, "box:2x2")


# -- reports ------------------------------------------------------------------

def test_report_json_is_deterministic():
    pat = preset_pattern(HEXAGONAL, "neighborhoods")
    a = lattice_bound(HEXAGONAL, pat)[0].to_json()
    b = lattice_bound(HEXAGONAL, pat)[0].to_json()
    assert a == b
    d = json.loads(a)
    assert "wall_clock" not in d
    assert d["certificate_ok"] and d["lambda"] >= 0.1190
    assert "wall_clock" in lattice_bound(HEXAGONAL, pat)[0].as_dict(timing=True)
