import random

from hypothesis import given, settings, strategies as st

from stratum.terms import apply_subst, compose, equal_mod_b, least_sort, plug, term_str

import oracles


def test_least_sorts(puzzle):
    assert least_sort(puzzle.parse_term('b')).name == 'Tile'
    assert least_sort(puzzle.parse_term('1 b 2 3')).name == 'Row'
    four = puzzle.engine.reduce(puzzle.parse_term('size(1 b 2 3)'))
    assert term_str(four) == '4'
    assert least_sort(four).name == 'NzNat'


def test_assoc_flattening(puzzle):
    t = puzzle.parse_term('(1 2) 3')
    assert len(t.args) == 3
    assert t is puzzle.parse_term('1 (2 3)')


def test_identity_removal(puzzle):
    assert puzzle.parse_term('nil 1') is puzzle.parse_term('1')
    assert puzzle.parse_term('nil 1 (2 3)') is puzzle.parse_term('1 2 3')


def test_comm_reordering():
    from stratum import corpus
    bb = corpus.registry('blackboard.maude').get('BLACKBOARD')
    assert equal_mod_b(bb.parse_term('8 7'), bb.parse_term('7 8'))


def test_no_comm_without_axiom(puzzle):
    assert not equal_mod_b(puzzle.parse_term('1 b'), puzzle.parse_term('b 1'))


def test_apply_subst_examples(puzzle):
    sig = puzzle.sig
    T = puzzle.vars['T']
    one = puzzle.parse_term('1')
    assert apply_subst(sig, puzzle.parse_term('T b'), {T: one}) is puzzle.parse_term('1 b')
    t = puzzle.parse_term('T b')
    assert apply_subst(sig, t, {}) is t
    R = puzzle.parse_term('R:Row')
    r = apply_subst(sig, puzzle.parse_term('1 2 R:Row'), {R: puzzle.parse_term('b 3')})
    assert r is puzzle.parse_term('1 2 b 3')
    assert len(r.args) == 4


def test_compose_examples(msig):
    sig = msig.sig
    X, Y, L, M = msig.vars
    a = msig.consts[0]
    s1 = {L: msig.make('u', [M])}
    s2 = {M: a}
    assert compose(sig, {}, s1) == s1
    assert compose(sig, s1, {}) == s1
    assert compose(sig, s2, s1)[L] is msig.make('u', [a])


def _recanon(ms, t):
    if t.is_var or not t.args:
        return t
    return ms.sig.make(t.sym, [_recanon(ms, a) for a in t.args])


def _scramble(ms, rng, t):
    """The same term modulo axioms, rebuilt through other groupings and orders."""
    if t.is_var or not t.args:
        return t
    sym = t.sym
    args = [_scramble(ms, rng, a) for a in t.args]
    if sym.comm:
        rng.shuffle(args)
    if sym.identity is not None and rng.random() < 0.5:
        args.insert(rng.randrange(len(args) + 1), sym.identity)
    if sym.assoc and len(args) > 2:
        k = rng.randrange(1, len(args))
        left = args[:k] if k == 1 else [ms.sig.make(sym, args[:k])]
        args = left + args[k:]
    return ms.sig.make(sym, args)


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_canonical_form_idempotent(msig, seed):
    rng = random.Random(seed)
    t = oracles.random_term(msig, rng, rng.randint(1, 14), msig.consts + [msig.e])
    assert _recanon(msig, t) is t


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_hash_consing_identifies_equal_modulo_axioms(msig, seed):
    rng = random.Random(seed)
    t = oracles.random_term(msig, rng, rng.randint(1, 14), msig.consts + [msig.e])
    u = _scramble(msig, rng, t)
    assert u is t
    assert equal_mod_b(u, t)
    other = oracles.random_term(msig, rng, rng.randint(1, 14), msig.consts + [msig.e])
    assert (other is t) == (term_str(other) == term_str(t))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_congruence(msig, seed):
    rng = random.Random(seed)
    x = oracles.random_term(msig, rng, 6, msig.consts)
    y = oracles.random_term(msig, rng, 6, msig.consts)
    for name in oracles.BINARY:
        assert msig.make(name, [x, y]) is msig.make(name, [_scramble(msig, rng, x), _scramble(msig, rng, y)])


def _random_subst(ms, rng, pool):
    out = {}
    for v in ms.vars:
        if rng.random() < 0.6:
            if v.sort.name == 'Elt':
                out[v] = rng.choice(ms.consts + ms.vars[:2])
            else:
                out[v] = oracles.random_term(ms, rng, rng.randint(1, 5), pool)
    return out


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_apply_subst_distributes_over_composition(msig, seed):
    rng = random.Random(seed)
    pool = msig.consts + msig.vars + [msig.e]
    t = oracles.random_term(msig, rng, rng.randint(1, 10), pool)
    s1 = _random_subst(msig, rng, pool)
    s2 = _random_subst(msig, rng, pool)
    sig = msig.sig
    assert apply_subst(sig, t, compose(sig, s2, s1)) is apply_subst(sig, apply_subst(sig, t, s1), s2)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_least_sort_below_declared_results(msig, seed):
    rng = random.Random(seed)
    t = oracles.random_term(msig, rng, rng.randint(1, 10), msig.consts + [msig.e])
    E = msig.sig.sort('E')
    Elt = msig.sig.sort('Elt')
    assert least_sort(t).leq(E)
    if t in msig.consts:
        assert least_sort(t) is Elt


def test_least_sort_under_subsorts(puzzle):
    puzzle_sort = puzzle.sig.sort('Puzzle')
    for text in ('1', 'b', '1 b', '1 b ; 2 b'):
        assert least_sort(puzzle.parse_term(text)).leq(puzzle_sort)
    assert least_sort(puzzle.parse_term('1 b ; 2 b')) is puzzle_sort


def test_plug_fills_hole(puzzle):
    sig = puzzle.sig
    ctx = sig.make(puzzle.parse_term('1 b').sym, [puzzle.parse_term('1'), sig.hole])
    assert plug(sig, ctx, puzzle.parse_term('b 2')) is puzzle.parse_term('1 b 2')
