import random

import pytest
from hypothesis import given, settings, strategies as st

from stratum import corpus
from stratum.corpus.micro import random_case
from stratum.module import Registry
from stratum.oracle import (BOTTOM, EMPTY, ResultSet, check_conditional_semantics, converge,
                            converged, evaluate, leq, let)
from stratum.terms import term_str
from stratum.vm import srewrite

INF = """
smod INF is
  protecting 15PUZZLE .
  strat inf : Nat @ Puzzle .
  var N : Nat .
  sd inf(N) := inf(N + 1) .
endsm
"""


@pytest.fixture(scope='module')
def strats(puzzle_reg):
    return puzzle_reg.get('15PUZZLE-STRATS')


def _ev(m, strat, term, depth):
    return evaluate(m, m.parse_strategy(strat), m.parse_term(term), depth)


def _strs(r):
    return {term_str(t) for t in r.terms}


def test_idle(puzzle):
    t = puzzle.parse_term('1 b 2')
    for d in range(3):
        assert evaluate(puzzle, puzzle.parse_strategy('idle'), t, d) == ResultSet((t,))


def test_call_at_depth_zero(strats):
    assert _ev(strats, 'move(2, 0)', '1 b 2 3 4', 0) == BOTTOM


def test_star(puzzle):
    r = _ev(puzzle, 'right *', '1 b 2 3', 1)
    assert not r.bottom and _strs(r) == {'1 b 2 3', '1 2 b 3', '1 2 3 b'}


def test_fail_converges_at_once(puzzle):
    d, r = converge(puzzle, puzzle.parse_strategy('fail'), puzzle.parse_term('1 b'))
    assert (d, r) == (0, EMPTY)


def test_move_converges_at_depth_three(strats):
    chain = [_ev(strats, 'move(2, 0)', '1 b 2 3 4', d) for d in range(5)]
    assert chain[:3] == [BOTTOM] * 3
    assert not chain[3].bottom and _strs(chain[3]) == {'1 2 3 b 4'}
    assert chain[4] == chain[3]
    t = strats.parse_term('1 b 2 3 4')
    assert not converged(strats, strats.parse_strategy('move(2, 0)'), t, 2)
    assert converged(strats, strats.parse_strategy('move(2, 0)'), t, 3)


def test_divergent_call_never_converges():
    reg = corpus.registry('puzzle.maude')
    reg.load_text(INF)
    m = reg.get('INF')
    for d in range(6):
        assert _ev(m, 'inf(0)', '1 b', d).bottom
    assert converge(m, m.parse_strategy('inf(0)'), m.parse_term('1 b'), 6)[0] is None


def _cond(m, c, th, el, term, depth=3):
    return check_conditional_semantics(m, m.parse_strategy(c), m.parse_strategy(th),
                                       m.parse_strategy(el), m.parse_term(term), depth)


def test_conditional_cases(strats):
    t = '1 b 2 3 4'
    for beta in ('right', 'left', 'right ; right'):
        assert _cond(strats, 'idle', beta, 'fail', t) == _ev(strats, beta, t, 3)
        assert _cond(strats, 'fail', 'fail', beta, t) == _ev(strats, beta, t, 3)
    assert _cond(strats, 'right', 'fail', 'idle', t) == EMPTY
    assert _strs(_cond(strats, 'right', 'fail', 'idle', '1 2 3 4 b')) == {'1 2 3 4 b'}
    # a condition that is only bottom evaluates neither branch
    assert _cond(strats, 'move(2, 0)', 'idle', 'idle', t, 0) == BOTTOM


def _rs(rng, pool=6):
    return ResultSet(rng.sample(range(pool), rng.randint(0, 3)), rng.random() < 0.4)


def _grow(rng, a, pool=6):
    """Some B with leq(a, B)."""
    if not a.bottom:
        return a
    extra = rng.sample(range(pool), rng.randint(0, 2))
    return ResultSet(a.terms | set(extra), rng.random() < 0.5)


def test_let_units():
    f = lambda x: ResultSet((x + 1,))
    assert let(EMPTY, f) == EMPTY
    assert let(BOTTOM, f) == BOTTOM


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_let_monotone(seed):
    rng = random.Random(seed)
    table = {x: _rs(rng) for x in range(6)}
    bigger = {x: _grow(rng, r) for x, r in table.items()}
    a = _rs(rng)
    a2 = _grow(rng, a)
    assert leq(let(a, table.get), let(a2, table.get))
    assert leq(let(a, table.get), let(a, bigger.get))


def _micro(seed):
    c = random_case(random.Random(seed))
    reg = Registry()
    reg.load_text(c.source)
    m = reg.get(c.module)
    return m, m.parse_strategy(c.strategy), m.parse_term(c.term)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_chain_is_monotone(seed):
    m, s, t = _micro(seed)
    prev = evaluate(m, s, t, 0)
    for d in range(1, 5):
        cur = evaluate(m, s, t, d)
        assert leq(prev, cur)
        prev = cur


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_final_sets_are_stable(seed):
    m, s, t = _micro(seed)
    d, r = converge(m, s, t, max_depth=6)
    if d is None:
        return
    for k in (1, 2, 3):
        assert evaluate(m, s, t, d + k) == r


ORACLE_CORPUS = [
    ('15PUZZLE', '1 b 2 ; 3 b 4', 'right'),
    ('15PUZZLE', '1 b 2 ; 3 b 4', 'left[T <- 1]'),
    ('15PUZZLE', '1 b 2 3', 'right *'),
    ('15PUZZLE', '1 2 ; 3 b', 'left ; up | up ; left'),
    ('15PUZZLE', '1 b 2 3 4', 'right !'),
    ('15PUZZLE', '1 b 2 ; 3 b 4', 'matchrew RU ; RD by RU using left, RD using right'),
    ('15PUZZLE', '1 b ; 1 b ; 2 b ; 2 b', 'xmatchrew R ; R by R using left'),
    ('15PUZZLE', '1 b', '(left | right) *'),
    ('15PUZZLE', 'b 1 2 ; b 3', 'right +'),
    ('15PUZZLE-STRATS', '1 b 2 3 4', 'move(2, 0)'),
    ('15PUZZLE-STRATS', '1 2 3 ; 4 5 6 ; 7 b 8', 'move(1, -2)'),
]


@pytest.mark.parametrize('module,term,strategy', ORACLE_CORPUS)
def test_oracle_agrees_with_vm_on_corpus(puzzle_reg, module, term, strategy):
    m = puzzle_reg.get(module)
    s = m.parse_strategy(strategy)
    t = m.parse_term(term)
    d, r = converge(m, s, t)
    assert d is not None
    assert set(r.terms) == set(srewrite(m, t, s))


@pytest.mark.parametrize('strategy,expected', [('play !', {'6', '5', '4', '3', '2'}), ('maxmin', {'3'})])
def test_oracle_agrees_with_vm_on_blackboard(strategy, expected):
    m = corpus.registry('blackboard.maude').get('BLACKBOARD-STRAT')
    s = m.parse_strategy(strategy)
    t = m.parse_term('8 7 4 3 2 1')
    d, r = converge(m, s, t)
    assert d is not None and _strs(r) == expected
    assert set(r.terms) == set(srewrite(m, t, s))


def test_tail_call_cycle_check_goes_beyond_the_denotation():
    # the VM prunes the repeated parameterless call; the denotation keeps unfolding it
    reg = corpus.registry('puzzle.maude')
    reg.load_text("""
smod CYC is
  protecting 15PUZZLE .
  strat cyc @ Row .
  sd cyc := idle | (left | right) ; cyc .
endsm
""")
    m = reg.get('CYC')
    s = m.parse_strategy('cyc')
    t = m.parse_term('1 b')
    d, r = converge(m, s, t, max_depth=6)
    assert d is None and _strs(r) == {'1 b', 'b 1'}
    assert {term_str(u) for u in srewrite(m, t, s)} == {'1 b', 'b 1'}
