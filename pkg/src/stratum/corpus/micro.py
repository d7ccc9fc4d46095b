"""Random small rewrite theories, subjects and strategies for differential tests.

A case is a module over constants a, b, c and a binary operator p (sometimes
commutative), with rules between constants plus an optional argument swap.
Subjects are constants or p applied to two constants, so at most nine states
are reachable.  Strategies nest at most four combinator levels, never use
`one`, and may call a terminating `go(k)` or the divergent `loop(0)`.
"""

import random
from dataclasses import dataclass

CONSTS = ('a', 'b', 'c')
MODULE = 'MICRO-STRATS'


@dataclass(frozen=True)
class MicroCase:
    source: str
    module: str
    term: str
    strategy: str
    labels: tuple


def _rules(rng):
    rules = []
    for k in range(rng.randint(1, 3)):
        lhs, rhs = rng.sample(CONSTS, 2)
        rules.append('  rl [r%d] : %s => %s .' % (k + 1, lhs, rhs))
    if rng.random() < 0.4:
        rules.append('  rl [sw] : p(a, X) => p(X, a) .')
    return rules


def _labels(rules):
    return tuple(r.split('[')[1].split(']')[0] for r in rules)


def random_strategy(rng, labels, depth, calls=True, param=None, divergent=True):
    """Strategy text with at most `depth` nested combinator levels."""
    leaves = ['idle', 'fail', 'all'] + list(labels) * 2
    leaves += ['top(%s)' % rng.choice(labels), '%s[X <- %s]' % (rng.choice(labels), rng.choice(CONSTS))]
    leaves += ['match p(X, Y) s.t. X = Y', 'amatch %s' % rng.choice(CONSTS), 'xmatch p(X, Y)']
    if calls:
        leaves += ['go(%d)' % rng.randint(0, 2)] * 2
        if divergent:
            leaves.append('loop(0)')
    if param is not None:
        leaves += [param] * 3
    if depth <= 1 or rng.random() < 0.25:
        return rng.choice(leaves)

    def sub(d=depth - 1):
        return random_strategy(rng, labels, d, calls, param, divergent)

    kind = rng.randrange(12)
    if kind == 0:
        return '(%s ; %s)' % (sub(), sub())
    if kind == 1:
        return '(%s | %s)' % (sub(), sub())
    if kind == 2:
        return '(%s) *' % sub()
    if kind == 3:
        return '(%s) +' % sub()
    if kind == 4:
        return '(%s) !' % sub()
    if kind == 5:
        return '(%s ? %s : %s)' % (sub(), sub(), sub())
    if kind == 6:
        return '(%s or-else %s)' % (sub(), sub())
    if kind == 7:
        return 'try(%s)' % sub()
    if kind == 8:
        return 'not(%s)' % sub()
    if kind == 9:
        return 'test(%s)' % sub()
    if kind == 10:
        return '(matchrew p(X, Y) by X using %s, Y using %s)' % (sub(), sub())
    return '(%s ; %s)' % (sub(), sub())


def random_case(rng=None, divergent=True):
    rng = rng or random.Random()
    comm = rng.random() < 0.4
    rules = _rules(rng)
    labels = _labels(rules)
    body = random_strategy(rng, labels, 2, calls=False, param='go(N)')
    source = '\n'.join([
        'mod MICRO is',
        '  sort S .',
        '  ops a b c : -> S [ctor] .',
        '  op p : S S -> S [ctor%s] .' % (' comm' if comm else ''),
        '  vars X Y : S .',
        *rules,
        'endm',
        '',
        'smod %s is' % MODULE,
        '  protecting MICRO .',
        '  protecting NAT .',
        '  strats go loop : Nat @ S .',
        '  vars X Y : S .',
        '  var N : Nat .',
        '  sd go(0) := idle .',
        '  sd go(s(N)) := %s .' % body,
        '  sd loop(N) := loop(N + 1) .',
        'endsm',
        '',
    ])
    if rng.random() < 0.3:
        term = rng.choice(CONSTS)
    else:
        term = 'p(%s, %s)' % (rng.choice(CONSTS), rng.choice(CONSTS))
    strategy = random_strategy(rng, labels, rng.randint(1, 4), divergent=divergent)
    return MicroCase(source, MODULE, term, strategy, labels)
