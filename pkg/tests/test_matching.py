import random

from hypothesis import given, settings, strategies as st

from stratum import corpus
from stratum.matching import check_plug, match_anywhere, match_extension, match_top
from stratum.terms import term_str

import oracles


def _named(sub):
    return {v.name: term_str(t) for v, t in sub.items()}


def test_match_top_assoc(puzzle):
    p = puzzle.parse_term('1 2 R:Row')
    s = puzzle.parse_term('1 2 b 3')
    assert [_named(r) for r in match_top(puzzle.sig, p, s)] == [{'R': 'b 3'}]


def test_match_top_variable(puzzle):
    s = puzzle.parse_term('1 b ; 2 b')
    P = puzzle.vars['P']
    assert match_top(puzzle.sig, P, s) == [{P: s}]


def test_match_top_assoc_comm():
    bb = corpus.registry('blackboard.maude').get('BLACKBOARD')
    p = bb.parse_term('M N')
    assert match_top(bb.sig, p, bb.parse_term('8 7 4')) == []
    got = sorted(sorted(_named(r).items()) for r in match_top(bb.sig, p, bb.parse_term('8 7')))
    assert got == [[('M', '7'), ('N', '8')], [('M', '8'), ('N', '7')]]


def test_extension_example(puzzle):
    sig = puzzle.sig
    p = puzzle.parse_term('b N:Nat')
    s = puzzle.parse_term('1 b 2')
    (sub, ctx), = match_extension(sig, p, s)
    assert _named(sub) == {'N': '2'}
    assert ctx is sig.make(s.sym, [puzzle.parse_term('1'), sig.hole])


def test_extension_without_axioms(puzzle):
    s = puzzle.parse_term('size(1 b)')
    assert match_extension(puzzle.sig, s, s) == [({}, puzzle.sig.hole)]


def test_extension_repeated_variable(puzzle):
    sig = puzzle.sig
    p = puzzle.parse_term('R:Row ; R:Row')
    s = puzzle.parse_term('1 b ; 1 b ; 2 b ; 2 b')
    got = {(_named(sub)['R'], term_str(ctx)) for sub, ctx in match_extension(sig, p, s)}
    rest1 = sig.make(s.sym, [sig.hole, puzzle.parse_term('2 b'), puzzle.parse_term('2 b')])
    rest2 = sig.make(s.sym, [puzzle.parse_term('1 b'), puzzle.parse_term('1 b'), sig.hole])
    assert got == {('1 b', term_str(rest1)), ('2 b', term_str(rest2))}


def test_structured_argument_collapses_to_identity(msig):
    m = msig.module
    e = msig.e
    L = msig.vars[2]
    # k(L, L) vanishes under m when L is e
    assert match_top(msig.sig, m.parse_term('m(L, k(L, L))'), e) == [{L: e}]
    (sub,) = match_top(msig.sig, m.parse_term('m(X, k(L, L))'), m.parse_term('a'))
    assert _named(sub) == {'X': 'a', 'L': 'e'}


def test_structured_argument_spans_segment(msig):
    m = msig.module
    # m(L, M) with L = e stands for a whole k-segment
    p = m.parse_term('k(m(L, M), X)')
    s = m.parse_term('k(k(m(a, c), a), b)')
    got = {tuple(sorted(_named(r).items())) for r in match_top(msig.sig, p, s)}
    assert (('L', 'e'), ('M', 'k(m(a, c), a)'), ('X', 'b')) in got
    assert got == {tuple(sorted(((v.name, term_str(t)) for v, t in b))) for b, c in
                   oracles.brute_match_anywhere(msig, p, s) if c is msig.sig.hole}


def test_anywhere_examples(puzzle):
    sig = puzzle.sig
    s = puzzle.parse_term('1 b 2 ; 3 b 4')
    tb = match_anywhere(sig, puzzle.parse_term('T b'), s)
    assert sorted(_named(sub)['T'] for sub, _ in tb) == ['1', '3']
    bt = match_anywhere(sig, puzzle.parse_term('b T'), s)
    assert sorted(_named(sub)['T'] for sub, _ in bt) == ['2', '4']
    for sub, ctx in tb + bt:
        assert check_plug(sig, puzzle.parse_term('T b') if (sub, ctx) in tb else puzzle.parse_term('b T'),
                          sub, ctx, s)


def test_anywhere_absent_operator(puzzle):
    assert match_anywhere(puzzle.sig, puzzle.parse_term('size(R:Row)'), puzzle.parse_term('1 b 2')) == []


def test_end_variables_take_the_whole_side(puzzle_reg):
    # top(multimv) on "1 b 2 b 3" has exactly two results
    m = puzzle_reg.get('15PUZZLE-JUMP')
    p = m.parse_term('LU b RU')
    s = m.parse_term('1 b 2 b 3')
    got = match_extension(m.sig, p, s)
    assert len(got) == 2
    assert all(ctx is m.sig.hole for _, ctx in got)


def test_equational_conditions(puzzle_reg):
    m = puzzle_reg.get('15PUZZLE-SOLVER')
    eng = m.engine
    N = m.vars['N']
    cond = m.parse_condition('N =/= 1')
    two = m.parse_term('2')
    assert eng.check_eq_condition(cond, {N: two}) == [{N: two}]
    assert eng.check_eq_condition(m.parse_condition('N =/= 2'), {N: two}) == []
    assert eng.check_eq_condition(m.parse_condition('true'), {N: two}) == [{N: two}]
    T = m.vars['T']
    got = eng.check_eq_condition(m.parse_condition('LL T NextT LR Pen Last := sequence'), {T: m.parse_term('1')})
    assert [term_str(s[m.vars['NextT']]) for s in got] == ['2']


def test_sort_test_condition(puzzle_reg):
    m = puzzle_reg.get('15PUZZLE-SOLVER')
    P = m.vars['P']
    eng = m.engine
    assert eng.check_eq_condition(m.parse_condition('P : Row'), {P: m.parse_term('1 b')})
    assert not eng.check_eq_condition(m.parse_condition('P : Row'), {P: m.parse_term('1 ; b')})


def _as_set(results):
    return {(frozenset(sub.items()), ctx) for sub, ctx in results}


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_anywhere_matches_brute_force(msig, seed):
    pattern, subject = oracles.random_match_case(msig, random.Random(seed))
    got = match_anywhere(msig.sig, pattern, subject)
    assert len(_as_set(got)) == len(got)
    assert _as_set(got) == oracles.brute_match_anywhere(msig, pattern, subject)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_results_plug_back(msig, seed):
    pattern, subject = oracles.random_match_case(msig, random.Random(seed))
    for sub, ctx in match_anywhere(msig.sig, pattern, subject):
        assert check_plug(msig.sig, pattern, sub, ctx, subject)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_top_inside_extension(msig, seed):
    pattern, subject = oracles.random_match_case(msig, random.Random(seed))
    ext = _as_set(match_extension(msig.sig, pattern, subject))
    for sub in match_top(msig.sig, pattern, subject):
        assert (frozenset(sub.items()), msig.sig.hole) in ext


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_repeatable(msig, seed):
    pattern, subject = oracles.random_match_case(msig, random.Random(seed))
    a = _as_set(match_anywhere(msig.sig, pattern, subject))
    assert a == _as_set(match_anywhere(msig.sig, pattern, subject))


def test_brute_force_notices_missing_extension(msig):
    # guard on the oracle itself: top-only matching at every position misses results
    from stratum.matching import _dedup, match_anywhere_raw
    rng = random.Random(1)
    differ = 0
    for _ in range(200):
        p, s = oracles.random_match_case(msig, rng)
        got = _dedup(msig.sig, p, match_anywhere_raw(msig.sig, p, s, {}, ext=False))
        differ += _as_set(got) != oracles.brute_match_anywhere(msig, p, s)
    assert differ > 0
