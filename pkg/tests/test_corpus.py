import random
import re

import pytest

from stratum import corpus
from stratum.corpus.micro import random_case
from stratum.fixtures import run_fixtures
from stratum.module import Registry
from stratum.parser import parse_modules
from stratum.vm import srewrite

import oracles

PROVENANCE = {'reference-transcript', 'brute-force-oracle', 'hand-checked'}
# run by the acceptance tests
SLOW = {'queens-all', 'solve', 'solve-unsolvable'}


@pytest.mark.parametrize('fname', corpus.names())
def test_every_module_builds(fname):
    reg = corpus.registry(fname)
    for src in parse_modules(corpus.source(fname)):
        m = reg.get(src.name)
        assert m.name == src.name


def test_fixture_schema():
    entries = corpus.fixtures()
    ids = [e['id'] for e in entries]
    assert len(ids) == len(set(ids))
    files = set(corpus.names())
    for e in entries:
        assert e['file'] in files
        assert e['mode'] in ('set', 'sequence', 'count')
        assert e['provenance'] in PROVENANCE
        if e['provenance'] == 'brute-force-oracle':
            assert e['oracle'].startswith('tests/oracles.py:')
    assert [e['id'] for e in entries if e.get('known_deviation')] == ['dsrew-bound']


@pytest.mark.parametrize('entry', [e for e in corpus.fixtures() if e['id'] not in SLOW],
                         ids=lambda e: e['id'])
def test_fixture(entry):
    (o,) = run_fixtures([entry])
    if entry.get('known_deviation'):
        assert o.status == 'known-deviation', o.got
    else:
        assert o.status == 'pass', (o.got, o.expected, o.error)


def _body(text, name):
    m = re.search(r'smod %s is\n(.*?)endsm' % re.escape(name), text, re.S)
    return [ln for ln in m.group(1).splitlines() if not ln.strip().startswith('protecting')]


@pytest.mark.parametrize('rows,pairs', [('15PUZZLE-STRATS', 'PAIRS-STRATS'),
                                        ('15PUZZLE-SOLVER', 'PAIRS-SOLVER')])
def test_pair_board_reuses_strategies_verbatim(rows, pairs):
    assert _body(corpus.source('puzzle.maude'), rows) == _body(corpus.source('puzzle_pairs.maude'), pairs)


def test_pair_board_moves():
    m = corpus.registry('puzzle_pairs.maude').get('PAIRS-STRATS')
    # blank at column 1, line 0: one step left, then one step down
    got = srewrite(m, m.parse_term('[0, 0, 1] [1, 0, b] [0, 1, 2] [1, 1, 3]'), m.parse_strategy('move(-1, 1)'))
    assert got == [m.parse_term('[0, 0, 2] [0, 1, b] [1, 0, 1] [1, 1, 3]')]


def test_queens_oracle():
    sols = oracles.queens_solutions()
    assert len(sols) == 92
    assert sols[0] == (1, 5, 8, 6, 3, 7, 2, 4)
    assert sols[1] == (1, 6, 8, 3, 7, 4, 2, 5)
    assert oracles.queens_solutions(4) == [(2, 4, 1, 3), (3, 1, 4, 2)]


def test_solvability_oracle():
    reference = (5, 1, 4, 8, 2, 14, 15, 3, 9, 7, 6, 11, 13, 10, 0, 12)
    swapped = (15, 2, 1, 12, 8, 5, 6, 11, 4, 9, 10, 7, 3, 14, 13, 0)
    assert oracles.solvable(reference)
    assert not oracles.solvable(swapped)
    assert oracles.solvable(tuple(range(1, 16)) + (0,))
    assert len(oracles.puzzle_states((1, 2, 3, 4, 5, 0), 3)) == 360


@pytest.mark.parametrize('seed', range(40))
def test_micro_cases_stay_small(seed):
    c = random_case(random.Random(seed))
    reg = Registry()
    reg.load_text(c.source)
    m = reg.get(c.module)
    assert 'one(' not in c.strategy
    states = list(m.engine._reachable(m.engine.reduce(m.parse_term(c.term))))
    assert len(states) <= 10
