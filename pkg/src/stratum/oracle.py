"""Bounded set-theoretic evaluator of strategies, used to cross-check the VM.

Results are `ResultSet`s: a finite set of terms plus a flag standing for
possible nontermination.  Strategy calls are unfolded up to a depth; a call
that would go deeper contributes only the flag.  Iteration is computed
exactly on the (finite) set of terms reached, unless a step budget runs out,
which also raises the flag.
"""

from itertools import product

from . import strategy as S
from .equational import initial_subst
from .matching import match, match_anywhere_raw, match_ext_raw, rebuild
from .terms import apply_subst


class ResultSet:
    __slots__ = ('terms', 'bottom')

    def __init__(self, terms=(), bottom=False):
        self.terms = frozenset(terms)
        self.bottom = bool(bottom)

    def __eq__(self, other):
        return isinstance(other, ResultSet) and self.terms == other.terms \
            and self.bottom == other.bottom

    def __hash__(self):
        return hash((self.terms, self.bottom))

    def __repr__(self):
        items = sorted(str(t) for t in self.terms)
        if self.bottom:
            items.append('⊥')
        return '{%s}' % ', '.join(items)

    def __or__(self, other):
        return ResultSet(self.terms | other.terms, self.bottom or other.bottom)

    @property
    def final(self):
        return not self.bottom


EMPTY = ResultSet()
BOTTOM = ResultSet((), True)


def leq(a, b):
    """The approximation order: equal, or a is open and its terms stay in b."""
    return a == b or (a.bottom and a.terms <= b.terms)


def let(a, f):
    """Feed every term of a into f and join the results; an open a stays open."""
    terms = set()
    bottom = a.bottom
    for x in a.terms:
        r = f(x)
        terms |= r.terms
        bottom = bottom or r.bottom
    return ResultSet(terms, bottom)


class BudgetExceeded(Exception):
    pass


class Oracle:
    def __init__(self, module, budget=20_000):
        self.module = module
        self.sig = module.sig
        self.engine = module.engine
        self.budget = budget
        self.steps = 0

    def _spend(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded()

    def eval(self, strat, t, depth, env=None):
        """Approximant of the denotation of strat on t with `depth` levels of calls."""
        self.steps = 0
        try:
            return self._eval(strat, env or {}, self.engine.reduce(t), depth)
        except BudgetExceeded:
            return BOTTOM

    # combinators

    def _eval(self, s, env, t, depth):
        self._spend()
        cls = s.__class__
        if cls is S.Idle:
            return ResultSet((t,))
        if cls is S.Fail:
            return EMPTY
        if cls is S.RuleApp:
            return self._rule_apply(s, env, t, depth)
        if cls is S.Test:
            return ResultSet((t,)) if self._test(s, env, t) else EMPTY
        if cls is S.Seq:
            out = ResultSet((t,))
            for part in s.parts:
                out = let(out, lambda u, p=part: self._eval(p, env, u, depth))
            return out
        if cls is S.Alt:
            out = EMPTY
            for part in s.parts:
                out = out | self._eval(part, env, t, depth)
            return out
        if cls is S.Star:
            return self._star(s.arg, env, t, depth)
        if cls is S.Plus:
            return let(self._eval(s.arg, env, t, depth),
                       lambda u: self._star(s.arg, env, u, depth))
        if cls is S.Bang:
            return let(self._star(s.arg, env, t, depth),
                       lambda u: self._cond(s.arg, S.FAIL, S.IDLE, env, u, depth))
        if cls is S.Cond:
            return self._cond(s.cond, s.then, s.other, env, t, depth)
        if cls is S.OrElse:
            return self._cond(s.first, S.IDLE, s.second, env, t, depth)
        if cls is S.Try:
            return self._cond(s.arg, S.IDLE, S.IDLE, env, t, depth)
        if cls is S.Not:
            return self._cond(s.arg, S.FAIL, S.IDLE, env, t, depth)
        if cls is S.TestOp:
            return self._cond(S.Not(s.arg), S.FAIL, S.IDLE, env, t, depth)
        if cls is S.MatchRew:
            return self._matchrew(s, env, t, depth)
        if cls is S.Call:
            return self._call(s, env, t, depth)
        if cls is S.One:
            raise ValueError('one(...) has no set-valued denotation')
        raise TypeError('unknown strategy node %r' % s)

    def _star(self, arg, env, t, depth):
        seen = {t}
        frontier = [t]
        bottom = False
        while frontier:
            nxt = []
            for u in frontier:
                r = self._eval(arg, env, u, depth)
                bottom = bottom or r.bottom
                for v in r.terms:
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return ResultSet(seen, bottom)

    def _cond(self, cond, then, other, env, t, depth):
        a = self._eval(cond, env, t, depth)
        if a.terms:
            return let(a, lambda u: self._eval(then, env, u, depth))
        if a.bottom:
            return BOTTOM
        return self._eval(other, env, t, depth)

    # matching helpers

    def _test(self, s, env, t):
        for sub in self._matches(s.mode, s.pattern, t, env):
            for _ in self.engine.solve_cond(s.cond, sub[0]):
                return True
        return False

    def _matches(self, mode, pattern, t, env):
        sig = self.sig
        if mode == 'match':
            return ((r, None) for r in match(sig, pattern, t, dict(env)))
        if mode == 'xmatch':
            return match_ext_raw(sig, pattern, t, dict(env))
        return match_anywhere_raw(sig, pattern, t, dict(env))

    # rule application

    def _rule_apply(self, ra, env, t, depth):
        eng = self.engine
        sig = self.sig
        pairs = [(n, eng.reduce(apply_subst(sig, v, env))) for n, v in ra.subst]
        terms = set()
        bottom = False
        for rule in eng.select_rules(ra.label):
            if ra.label is not None and rule.n_rw != len(ra.strats):
                continue
            sub0 = initial_subst(rule, pairs)
            if sub0 is None:
                continue
            strats = ra.strats if ra.label is not None else None
            for sub, ctx in eng.rule_matches(rule, sub0, t, ra.top):
                subs, b = self._check(rule.cond, 0, sub, strats, 0, env, depth)
                bottom = bottom or b
                for s2 in subs:
                    u = eng.finish(rule, s2, ctx)
                    if u is not None:
                        terms.add(u)
        return ResultSet(terms, bottom)

    def _check(self, cond, i, sub, strats, k, env, depth):
        """Substitutions satisfying cond[i:] and an openness flag."""
        eng = self.engine
        j = i
        while j < len(cond) and cond[j][0] != 'rw':
            j += 1
        out = []
        bottom = False
        for s2 in eng.solve_cond(cond[:j], sub, i):
            if j == len(cond):
                out.append(s2)
                continue
            frag = cond[j]
            lhs = eng.reduce(eng._inst(frag[1], s2))
            if strats is None:
                # `all`: rewriting fragments follow unrestricted search
                res = self._star(S.RuleApp(None), {}, lhs, depth)
            else:
                res = self._eval(strats[k], env, lhs, depth)
            bottom = bottom or res.bottom
            for u in res.terms:
                for s3 in match(self.sig, frag[2], u, s2):
                    more, b = self._check(cond, j + 1, s3, strats, k + 1, env, depth)
                    out.extend(more)
                    bottom = bottom or b
        return out, bottom

    # subterm rewriting and calls

    def _matchrew(self, mr, env, t, depth):
        sig = self.sig
        eng = self.engine
        terms = set()
        bottom = False
        seen = set()
        for sub, ctx in self._matches(mr.mode, mr.pattern, t, env):
            for s2 in eng.solve_cond(mr.cond, sub):
                key = (frozenset(s2.items()), rebuild(sig, ctx, sig.hole))
                if key in seen:
                    continue
                seen.add(key)
                results = [self._eval(strat, s2, s2[v], depth) for v, strat in mr.pairs]
                # an open subterm computation leaves the whole matchrew open
                bottom = bottom or any(r.bottom for r in results)
                for combo in product(*(list(r.terms) for r in results)):
                    s3 = dict(s2)
                    for (v, _), val in zip(mr.pairs, combo):
                        s3[v] = val
                    filled = apply_subst(sig, mr.pattern, s3)
                    terms.add(eng.reduce(rebuild(sig, ctx, filled)))
        return ResultSet(terms, bottom)

    def _call(self, call, env, t, depth):
        eng = self.engine
        sig = self.sig
        decl = self.module.strats[(call.name, len(call.args))]
        args = [eng.reduce(apply_subst(sig, a, env)) for a in call.args]
        tup = sig.make(decl.tuple_sym, args)
        out = EMPTY
        for d in decl.defs:
            seen = set()
            for sub in match(sig, d.lhs, tup, {}):
                for s2 in eng.solve_cond(d.cond, sub):
                    key = frozenset(s2.items())
                    if key in seen:
                        continue
                    seen.add(key)
                    if depth == 0:
                        out = out | BOTTOM
                    else:
                        out = out | self._eval(d.body, s2, t, depth - 1)
        return out


def evaluate(module, strat, t, depth, env=None, budget=20_000):
    return Oracle(module, budget).eval(strat, t, depth, env)


def check_conditional_semantics(module, cond, then, other, t, depth, env=None, budget=20_000):
    """The conditional on its own: cond ? then : other evaluated on t."""
    o = Oracle(module, budget)
    try:
        return o._cond(cond, then, other, env or {}, o.engine.reduce(t), depth)
    except BudgetExceeded:
        return BOTTOM


def converged(module, strat, t, depth, env=None, budget=20_000):
    return evaluate(module, strat, t, depth, env, budget).final


def converge(module, strat, t, max_depth=12, env=None, budget=20_000):
    """First final approximant up to max_depth, as (depth, result); else (None, last)."""
    r = BOTTOM
    for n in range(max_depth + 1):
        r = evaluate(module, strat, t, n, env, budget)
        if r.final:
            return n, r
    return None, r
