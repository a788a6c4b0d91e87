import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lconductor import forms as bqf
from lconductor.errors import InputError, InvalidFormError, ParseError, ResourceError
from lconductor.forms import QuadForm


def brute_reduced(q):
    out = []
    for a in range(1, math.isqrt(q // 3) + 2):
        for b in range(-a + 1, a + 1):
            if (b * b + q) % (4 * a):
                continue
            c = (b * b + q) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append(QuadForm(a, b, c))
    return sorted(out)


def order_profile(G):
    # number of elements killed by k, for each k | h: determines the abelian group
    return {k: math.prod(math.gcd(k, m) for m in G.invariant_factors) for k in range(1, G.h + 1) if G.h % k == 0}


def brute_profile(G):
    return {k: sum(bqf.power(f, k) == G.principal for f in G.forms) for k in range(1, G.h + 1) if G.h % k == 0}


SMALL_Q = [23, 47, 56, 84, 87, 104, 231, 420, 1155, 3315, 5460, 10007, 100003]


@pytest.mark.parametrize("q", SMALL_Q)
def test_reduced_forms_match_brute_force(q, group):
    assert list(group(q).forms) == brute_reduced(q)


@pytest.mark.parametrize("q", SMALL_Q)
def test_structure_matches_element_orders(q, group):
    G = group(q)
    assert math.prod(G.invariant_factors) == G.h
    assert all(a % b == 0 for a, b in zip(G.invariant_factors, G.invariant_factors[1:]))
    assert order_profile(G) == brute_profile(G)


@pytest.mark.parametrize("q", SMALL_Q)
def test_coordinates_are_a_bijection_and_homomorphism(q, group):
    G = group(q)
    m = G.invariant_factors
    assert len(set(G.coords.values())) == G.h
    for f, g in itertools.islice(itertools.product(G.forms, repeat=2), 400):
        want = tuple((a + b) % mi for a, b, mi in zip(G.coords[f], G.coords[g], m))
        assert G.coords[G.compose(f, g)] == want
    for e in itertools.islice(itertools.product(*(range(k) for k in m)), 50):
        assert G.coords[G.element(e)] == e


def test_known_small_groups(group):
    assert group(23).h == 3 and group(23).invariant_factors == (3,)
    assert group(84).invariant_factors == (2, 2)
    assert group(420).invariant_factors == (2, 2, 2)
    assert group(56).invariant_factors == (4,)


def test_composition_examples():
    assert bqf.compose((2, 1, 3), (2, 1, 3)) == QuadForm(2, -1, 3)
    assert bqf.compose((2, 1, 3), (2, -1, 3)) == QuadForm(1, 1, 6)
    assert bqf.reduce((6, 11, 6)) == QuadForm(1, 1, 6)  # disc -23
    assert bqf.power((2, 1, 3), 3) == QuadForm(1, 1, 6)


def test_reduce_rejects_indefinite():
    with pytest.raises(InvalidFormError):
        bqf.reduce((1, 5, 1))
    with pytest.raises(InvalidFormError):
        bqf.reduce((-1, 0, -3))


@pytest.mark.parametrize("q", [0, 3, 5, 6, -7])
def test_invalid_discriminants(q):
    with pytest.raises(InputError):
        bqf.class_group(q)


def test_non_fundamental_warns():
    with pytest.warns(UserWarning):
        G = bqf.class_group(92 * 4)
    assert G.h == len(brute_reduced(368))
    assert not bqf.is_fundamental(368) and bqf.is_fundamental(23) and bqf.is_fundamental(84)


def test_class_number_budget():
    with pytest.raises(ResourceError):
        bqf.class_group(10007, max_h=10)


def test_compose_discriminant_mismatch():
    with pytest.raises(InputError):
        bqf.compose((1, 1, 6), (1, 1, 2))


def test_usable_character_counts(group):
    assert bqf.count_usable_characters(group(23)) == 1
    assert bqf.count_usable_characters(group(84)) == 0
    G = group(10007)
    chars = bqf.usable_characters(G.invariant_factors)
    assert len(chars) == bqf.count_usable_characters(G)
    seen = set()
    for chi in chars:
        conj = bqf.conjugate_character(chi, G.invariant_factors)
        assert conj not in seen and chi not in seen and conj != chi
        seen |= {chi, conj}
    assert len(seen) + len(bqf.genus_characters(G.invariant_factors)) == G.h


def test_character_values_are_multiplicative(group):
    G = group(4004)
    chi = bqf.usable_characters(G.invariant_factors)[-1]
    for f, g in itertools.islice(itertools.product(G.forms, repeat=2), 200):
        lhs = bqf.character_value(G, chi, G.compose(f, g))
        assert abs(lhs - bqf.character_value(G, chi, f) * bqf.character_value(G, chi, g)) < 1e-12


def test_forms_cache_roundtrip(tmp_path, group):
    G = group(3315)
    p = bqf.write_forms_cache(G, tmp_path / "f.tsv")
    H = bqf.read_forms_cache(p)
    assert H.forms == G.forms and H.invariant_factors == G.invariant_factors and H.coords == G.coords
    bqf.write_forms_cache(H, tmp_path / "g.tsv")
    assert (tmp_path / "f.tsv").read_bytes() == (tmp_path / "g.tsv").read_bytes()


def test_forms_cache_errors(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("BQF1 23 3 3\n1 1 6 0\n2 1 3 1\n2 -1 4 2\n")
    with pytest.raises(ParseError, match="line 4"):
        bqf.read_forms_cache(bad)
    bad.write_text("")
    with pytest.raises(ParseError):
        bqf.read_forms_cache(bad)


DISCS = [23, 47, 84, 87, 231, 1155, 3315, 10007]


@st.composite
def form_pairs(draw):
    q = draw(st.sampled_from(DISCS))
    forms = brute_reduced(q)
    return q, draw(st.sampled_from(forms)), draw(st.sampled_from(forms)), draw(st.sampled_from(forms))


@settings(max_examples=60, deadline=None)
@given(form_pairs())
def test_group_laws(data):
    q, f, g, k = data
    e = bqf.principal_form(q)
    assert bqf.compose(f, g) == bqf.compose(g, f)
    assert bqf.compose(bqf.compose(f, g), k) == bqf.compose(f, bqf.compose(g, k))
    assert bqf.compose(f, e) == f
    assert bqf.compose(f, f.inverse()) == e


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(DISCS), st.integers(-50, 50), st.integers(-50, 50))
def test_reduction_invariants(q, s, t):
    f = brute_reduced(q)[abs(s) % len(brute_reduced(q))]
    # act by the unimodular substitution (x, y) -> (x + s y, y), then swap with a sign
    a, b, c = f
    g = (a, b + 2 * a * s, a * s * s + b * s + c)
    g = (g[2], -g[1], g[0])
    g = (g[0], g[1] + 2 * g[0] * t, g[0] * t * t + g[1] * t + g[2])
    r = bqf.reduce(g)
    assert r.is_reduced() and r.discriminant == -q and r == f
    assert bqf.reduce(r) == r


def test_representation_multiset_is_class_invariant():
    f = QuadForm(2, 1, 3)
    g = (2, 1 + 4 * 3, 2 * 9 + 3 + 3)
    vals = lambda h: Counter(h[0] * x * x + h[1] * x * y + h[2] * y * y for x in range(-40, 41) for y in range(-40, 41))
    assert bqf.reduce(g) == f
    small = lambda c: {n: k for n, k in c.items() if n <= 30}
    assert small(vals(f)) == small(vals(g))
