import random

import pytest
from hypothesis import given, settings, strategies as st

from stratum import corpus
from stratum.corpus.micro import random_case
from stratum.equational import LimitExceeded
from stratum.module import Registry
from stratum.vm import VM, dsrewrite, srewrite

from conftest import solutions

RECURSION = """
smod REC is
  protecting 15PUZZLE .
  strats walk cyc @ Row .
  strat cycn : Nat @ Row .
  var N : Nat .
  sd walk := idle | right ; walk .
  sd cyc := idle | (left | right) ; cyc .
  sd cycn(N) := idle | (left | right) ; cycn(N) .
endsm
"""


@pytest.fixture(scope='module')
def rec():
    reg = corpus.registry('puzzle.maude')
    reg.load_text(RECURSION)
    return reg.get('REC')


@pytest.mark.parametrize('term,strategy,expected', [
    ('1 b 2', 'fail', set()),
    ('1 b 2', 'idle', {'1 b 2'}),
    ('1 b 2 3', 'right *', {'1 b 2 3', '1 2 b 3', '1 2 3 b'}),
    ('1 b', '(left | right) *', {'1 b', 'b 1'}),
    ('1 2 ; 3 b', 'left ; up | up ; left', {'b 2 ; 1 3', 'b 1 ; 3 2'}),
    ('1 2 3 4 b', 'right ? fail : idle', {'1 2 3 4 b'}),
    ('1 b 2 3 4', 'right !', {'1 2 3 4 b'}),
    ('1 b 2 ; 3 b 4', 'matchrew RU ; RD by RU using left, RD using right', {'b 1 2 ; 3 4 b'}),
    ('1 b ; 1 b ; 2 b ; 2 b', 'xmatchrew R ; R by R using left',
     {'b 1 ; b 1 ; 2 b ; 2 b', '1 b ; 1 b ; b 2 ; b 2'}),
    ('1 b 2', 'matchrew P by P using idle', {'1 b 2'}),
    ('1 b 2', 'amatchrew T b by T using idle', {'1 b 2'}),
    ('1 b 2', 'try(right) ; not(right)', {'1 2 b'}),
    ('1 b 2', 'test(right)', {'1 b 2'}),
    ('1 b 2', 'left or-else right', {'b 1 2'}),
    ('b 1 2', 'left or-else right', {'1 b 2'}),
    ('1 b 2', 'xmatch b N:Nat s.t. N:Nat =/= 1', {'1 b 2'}),
    ('1 b 2', 'match b N:Nat s.t. N:Nat =/= 1', set()),
    ('1 b 2', 'all', {'b 1 2', '1 2 b'}),
])
def test_transcript_examples(puzzle, term, strategy, expected):
    assert set(solutions(puzzle, term, strategy)) == expected
    assert set(solutions(puzzle, term, strategy, depth_first=True)) == expected


def test_one_yields_a_single_solution(puzzle):
    got = solutions(puzzle, '1 b 2 3', 'one(right +)')
    assert len(got) == 1 and got[0] in {'1 2 b 3', '1 2 3 b'}


def test_calls(puzzle_reg):
    m = puzzle_reg.get('15PUZZLE-STRATS')
    assert solutions(m, '1 b 2 3 4', 'move(2, 0)') == ['1 2 3 b 4']
    assert solutions(m, '1 2 3 ; 4 5 6 ; 7 b 8', 'move(1, -2)') == ['1 2 b ; 4 5 3 ; 7 8 6']
    assert solutions(m, '1 b 2', 'move(5, 0)') == []


def test_rewriting_condition_strategies(puzzle_reg):
    m = puzzle_reg.get('15PUZZLE-LOG')
    assert solutions(m, '< nil | 1 b 2 >', "move[M <- 'left]{left}") == ["< 'left | b 1 2 >"]
    # a rule with one rewriting fragment is not selected without its strategy
    assert solutions(m, '< nil | 1 b 2 >', "move[M <- 'left]") == []


def test_srew_bound_transcript(puzzle):
    assert set(solutions(puzzle, 'b 1 2 ; b 3', 'right +', bound=2)) == {'1 b 2 ; b 3', 'b 1 2 ; 3 b'}


def test_dsrew_follows_one_branch_first(puzzle):
    got = solutions(puzzle, 'b 1 2 ; b 3', 'right +', depth_first=True, bound=2)
    assert got[0] == '1 b 2 ; b 3'
    assert len(got) == 2


def test_parameterless_tail_calls_are_cycle_checked(rec):
    assert set(solutions(rec, 'b 1 2', 'walk')) == {'b 1 2', '1 b 2', '1 2 b'}
    assert set(solutions(rec, '1 b', 'cyc')) == {'1 b', 'b 1'}
    assert set(solutions(rec, '1 b', 'cyc', depth_first=True)) == {'1 b', 'b 1'}


def test_parameterized_calls_are_not_cycle_checked(rec):
    with pytest.raises(LimitExceeded):
        solutions(rec, '1 b', 'cycn(0)', state_limit=2000)
    with pytest.raises(LimitExceeded):
        solutions(rec, '1 b', 'cycn(0)', depth_first=True, state_limit=2000)
    # solutions still come out before the limit
    vm = VM(rec, state_limit=2000)
    it = vm.run(rec.parse_term('1 b'), rec.parse_strategy('cycn(0)'))
    assert {str(next(it)), str(next(it))} == {'1 b', 'b 1'}


def test_matchrew_sees_outer_bindings():
    m = corpus.registry('blackboard.maude').get('BLACKBOARD-STRAT')
    assert solutions(m, '8 7 4 3 2 1', 'maxmin') == ['3']


def test_matchrew_siblings_are_independent(puzzle):
    # each side rewrites its own copy; results combine pairwise
    got = set(solutions(puzzle, '1 b ; b 2', 'matchrew R1:Row ; R2:Row by R1:Row using (left | idle), '
                                              'R2:Row using (right | idle)'))
    assert got == {'1 b ; b 2', 'b 1 ; b 2', '1 b ; 2 b', 'b 1 ; 2 b'}


def test_state_limit(puzzle):
    with pytest.raises(LimitExceeded):
        srewrite(puzzle, puzzle.parse_term('1 2 3 ; 4 5 6 ; 7 8 b'), puzzle.parse_strategy('all *'),
                 state_limit=50)


def test_no_dedup_reports_repeats(puzzle):
    t = puzzle.parse_term('1 b 2')
    s = puzzle.parse_strategy('right ; left | idle')
    assert len(srewrite(puzzle, t, s)) == 1
    assert len(srewrite(puzzle, t, s, dedup=False)) == 2


CORPUS_RUNS = [
    ('puzzle.maude', '15PUZZLE', '1 b 2 ; 3 b 4', 'right | left ; up'),
    ('puzzle.maude', '15PUZZLE-STRATS', '1 2 3 ; 4 5 6 ; 7 b 8', 'move(1, -2) | loop'),
    ('puzzle.maude', '15PUZZLE-SOLVER', '5 1 4 8 ; 2 14 15 3 ; 9 7 6 11 ; 13 10 b 12', 'solve'),
    ('blackboard.maude', 'BLACKBOARD-STRAT', '8 7 4 3 2 1', 'play !'),
    ('blackboard.maude', 'BLACKBOARD-STRAT', '8 7 4 3 2 1', 'minmin'),
    ('queens.maude', 'BT-QUEENS', '1 5', 'solve'),
]


@pytest.mark.parametrize('fname,module,term,strategy', CORPUS_RUNS)
def test_breadth_and_depth_first_agree_on_corpus(fname, module, term, strategy):
    m = corpus.registry(fname).get(module)
    assert set(solutions(m, term, strategy)) == set(solutions(m, term, strategy, depth_first=True))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_breadth_and_depth_first_agree_on_random_specs(seed):
    c = random_case(random.Random(seed))
    reg = Registry()
    reg.load_text(c.source)
    m = reg.get(c.module)
    t = m.parse_term(c.term)
    s = m.parse_strategy(c.strategy)
    try:
        bfs = set(srewrite(m, t, s, state_limit=2000))
        dfs = set(dsrewrite(m, t, s, state_limit=2000))
    except LimitExceeded:
        return
    assert bfs == dfs
