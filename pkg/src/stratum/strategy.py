"""Strategy expressions.

Nodes are immutable.  Derived combinators (or-else, not, !, try, test, +)
keep their own node types; the engine gives them their defining meaning.
"""

from .terms import term_str

# binding levels used by the printer, tightest last
LV_COND, LV_ORELSE, LV_ALT, LV_SEQ, LV_POSTFIX, LV_ATOM = range(6)


class Strat:
    __slots__ = ()
    level = LV_ATOM

    def __repr__(self):
        return strat_str(self)

    def children(self):
        return ()


class Idle(Strat):
    __slots__ = ()


class Fail(Strat):
    __slots__ = ()


IDLE = Idle()
FAIL = Fail()


class RuleApp(Strat):
    """Application of the rules labelled `label` (all executable rules if label is None)."""
    __slots__ = ('label', 'subst', 'strats', 'top')

    def __init__(self, label, subst=(), strats=(), top=False):
        self.label = label
        self.subst = tuple(subst)
        self.strats = tuple(strats)
        self.top = top

    def children(self):
        return self.strats


class Test(Strat):
    __slots__ = ('mode', 'pattern', 'cond')

    def __init__(self, mode, pattern, cond=()):
        self.mode = mode
        self.pattern = pattern
        self.cond = tuple(cond)


class Seq(Strat):
    __slots__ = ('parts',)
    level = LV_SEQ

    def __init__(self, parts):
        self.parts = tuple(parts)

    def children(self):
        return self.parts


class Alt(Strat):
    __slots__ = ('parts',)
    level = LV_ALT

    def __init__(self, parts):
        self.parts = tuple(parts)

    def children(self):
        return self.parts


class _Unary(Strat):
    __slots__ = ('arg',)

    def __init__(self, arg):
        self.arg = arg

    def children(self):
        return (self.arg,)


class Star(_Unary):
    __slots__ = ()
    level = LV_POSTFIX


class Plus(_Unary):
    __slots__ = ()
    level = LV_POSTFIX


class Bang(_Unary):
    __slots__ = ()
    level = LV_POSTFIX


class Not(_Unary):
    __slots__ = ()


class Try(_Unary):
    __slots__ = ()


class TestOp(_Unary):
    __slots__ = ()


class One(_Unary):
    __slots__ = ()


class Cond(Strat):
    __slots__ = ('cond', 'then', 'other')
    level = LV_COND

    def __init__(self, cond, then, other):
        self.cond = cond
        self.then = then
        self.other = other

    def children(self):
        return (self.cond, self.then, self.other)


class OrElse(Strat):
    __slots__ = ('first', 'second')
    level = LV_ORELSE

    def __init__(self, first, second):
        self.first = first
        self.second = second

    def children(self):
        return (self.first, self.second)


class MatchRew(Strat):
    __slots__ = ('mode', 'pattern', 'cond', 'pairs')
    level = LV_COND

    def __init__(self, mode, pattern, cond, pairs):
        self.mode = mode
        self.pattern = pattern
        self.cond = tuple(cond)
        self.pairs = tuple(pairs)

    def children(self):
        return tuple(s for _, s in self.pairs)


class Call(Strat):
    __slots__ = ('name', 'args')

    def __init__(self, name, args=()):
        self.name = name
        self.args = tuple(args)


class StratDecl:
    __slots__ = ('name', 'arg_sorts', 'subject', 'defs', 'tuple_sym')

    def __init__(self, name, arg_sorts, subject):
        self.name = name
        self.arg_sorts = tuple(arg_sorts)
        self.subject = subject
        self.defs = []
        self.tuple_sym = None

    @property
    def key(self):
        return (self.name, len(self.arg_sorts))


class StratDef:
    __slots__ = ('decl', 'lhs', 'cond', 'body', 'line')

    def __init__(self, decl, lhs, cond, body, line=None):
        self.decl = decl
        self.lhs = lhs          # tuple pattern term over decl.tuple_sym
        self.cond = tuple(cond)
        self.body = body
        self.line = line


# conditions are tuples: ('bool', t) ('eq', l, r) ('match', l, r) ('sort', t, sort) ('rw', l, r)

def cond_str(cond):
    out = []
    for frag in cond:
        k = frag[0]
        if k == 'bool':
            out.append(term_str(frag[1]))
        elif k == 'sort':
            out.append('%s : %s' % (term_str(frag[1]), frag[2].name))
        else:
            op = {'eq': '=', 'match': ':=', 'rw': '=>'}[k]
            out.append('%s %s %s' % (term_str(frag[1]), op, term_str(frag[2])))
    return ' /\\ '.join(out)


def _wrap(s, level):
    text = strat_str(s)
    return '(%s)' % text if s.level < level else text


def strat_str(s):
    if isinstance(s, Idle):
        return 'idle'
    if isinstance(s, Fail):
        return 'fail'
    if isinstance(s, RuleApp):
        if s.label is None:
            text = 'all'
        else:
            text = s.label
            if s.subst:
                text += '[%s]' % ', '.join('%s <- %s' % (n, term_str(v)) for n, v in s.subst)
            if s.strats:
                text += '{%s}' % ', '.join(strat_str(x) for x in s.strats)
        return 'top(%s)' % text if s.top else text
    if isinstance(s, Test):
        text = '%s %s' % (s.mode, term_str(s.pattern))
        if s.cond:
            text += ' s.t. ' + cond_str(s.cond)
        return text
    if isinstance(s, Seq):
        return ' ; '.join(_wrap(p, LV_SEQ + 1) for p in s.parts)
    if isinstance(s, Alt):
        return ' | '.join(_wrap(p, LV_ALT + 1) for p in s.parts)
    if isinstance(s, Star):
        return _wrap(s.arg, LV_ATOM) + ' *'
    if isinstance(s, Plus):
        return _wrap(s.arg, LV_ATOM) + ' +'
    if isinstance(s, Bang):
        return _wrap(s.arg, LV_ATOM) + ' !'
    if isinstance(s, Cond):
        return '%s ? %s : %s' % (_wrap(s.cond, LV_ORELSE), _wrap(s.then, LV_ORELSE),
                                 _wrap(s.other, LV_ORELSE))
    if isinstance(s, OrElse):
        return '%s or-else %s' % (_wrap(s.first, LV_ORELSE), _wrap(s.second, LV_ALT))
    if isinstance(s, MatchRew):
        text = '%srew %s' % (s.mode, term_str(s.pattern))
        if s.cond:
            text += ' s.t. ' + cond_str(s.cond)
        pairs = ', '.join('%s using %s' % (term_str(v), _wrap(a, LV_ALT)) for v, a in s.pairs)
        return '%s by %s' % (text, pairs)
    if isinstance(s, Call):
        if s.args:
            return '%s(%s)' % (s.name, ', '.join(term_str(a) for a in s.args))
        return s.name
    for cls, word in ((Not, 'not'), (Try, 'try'), (TestOp, 'test'), (One, 'one')):
        if isinstance(s, cls):
            return '%s(%s)' % (word, strat_str(s.arg))
    raise TypeError(s)


def walk(s):
    yield s
    for c in s.children():
        yield from walk(c)
