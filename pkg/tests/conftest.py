import pytest

from stratum import corpus
from stratum.terms import term_str
from stratum.vm import dsrewrite, srewrite

import oracles


@pytest.fixture(scope='session')
def puzzle_reg():
    return corpus.registry('puzzle.maude')


@pytest.fixture(scope='session')
def puzzle(puzzle_reg):
    return puzzle_reg.get('15PUZZLE')


@pytest.fixture(scope='session')
def msig():
    return oracles.load_match_sig()


def solutions(module, term, strategy, depth_first=False, bound=None, **kw):
    """Solution strings of a strategy run, in the order produced."""
    run = dsrewrite if depth_first else srewrite
    t = module.parse_term(term) if isinstance(term, str) else term
    s = module.parse_strategy(strategy) if isinstance(strategy, str) else strategy
    return [term_str(u) for u in run(module, t, s, bound, **kw)]


def norm(module, text):
    return term_str(module.engine.reduce(module.parse_term(text)))
