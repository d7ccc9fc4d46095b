"""Equational simplification, one-step rule application, search and rewrite."""

from collections import deque

from .builtins import eval_lazy, eval_strict
from .matching import match, match_anywhere_raw, match_ext, match_ext_raw, rebuild
from .terms import apply_subst

DEFAULT_EQ_LIMIT = 1_000_000
DEFAULT_STATE_LIMIT = 100_000


class LimitExceeded(Exception):
    """A configured step or state limit was hit."""


class UnboundVariable(Exception):
    pass


def rule_vars(rule):
    out = set(rule.lhs.variables()) | rule.rhs.variables()
    for frag in rule.cond:
        for t in frag[1:]:
            if hasattr(t, 'variables'):
                out |= t.variables()
    return out


def initial_subst(rule, pairs):
    """Bindings of a rule application's [x <- t] list for this rule; None if ill-sorted."""
    if not pairs:
        return {}
    by_name = {v.name: v for v in rule_vars(rule)}
    sub = {}
    for name, value in pairs:
        v = by_name.get(name)
        if v is None:
            continue
        if not (v.sort is value.sort or v.sort in value.sort.supers):
            return None
        sub[v] = value
    return sub


class Engine:
    def __init__(self, module, eq_limit=DEFAULT_EQ_LIMIT, state_limit=DEFAULT_STATE_LIMIT):
        self.module = module
        self.sig = module.sig
        self.eqs = module.eqs
        self.cache = {}
        self.rewrites = 0
        self.eq_steps = 0
        self.eq_limit = eq_limit
        self.state_limit = state_limit

    def reset_counters(self):
        self.rewrites = 0
        self.eq_steps = 0

    def _tick(self):
        self.rewrites += 1
        self.eq_steps += 1
        if self.eq_steps > self.eq_limit:
            raise LimitExceeded('equational step limit (%d) exceeded' % self.eq_limit)

    # reduction

    def reduce(self, t):
        if t.is_var or (not t.args and t.sym.special is None and t.sym not in self.eqs):
            return t
        r = self.cache.get(t)
        if r is None:
            r = self._reduce(t)
            self.cache[t] = r
            self.cache[r] = r
        return r

    def _reduce(self, t):
        sig = self.sig
        sym = t.sym
        if sym.lazy:
            nxt = eval_lazy(sig, sym.special, t.args, self.reduce)
            if nxt is not None:
                self._tick()
                return self.reduce(nxt)
        args = t.args
        new = [self.reduce(a) for a in args]
        u = t
        for a, b in zip(args, new):
            if a is not b:
                u = sig.make(sym, new)
                break
        if u.is_var:
            return u
        if u is not t and u.sym is not sym:
            # identity collapse left a normal argument, or a new top symbol
            return self.reduce(u)
        if u.sym.special is not None and not u.sym.lazy:
            v = eval_strict(sig, u.sym.special, u.args)
            if v is not None:
                self._tick()
                return self.reduce(v)
        eqs = self.eqs.get(u.sym)
        if eqs:
            v = self._apply_eq(u, eqs)
            if v is not None:
                return self.reduce(v)
        return u

    def _apply_eq(self, u, eqs):
        sig = self.sig
        # owise equations are sorted last, so they only fire when the others fail
        for eq in eqs:
            for sub, left, right in match_ext(sig, eq.lhs, u, {}):
                for s2 in self.solve_cond(eq.cond, sub):
                    rhs = apply_subst(sig, eq.rhs, s2)
                    self._tick()
                    if left is None:
                        return rhs
                    return sig.make(u.sym, left + (rhs,) + right)
        return None

    # conditions

    def _inst(self, t, sub):
        r = apply_subst(self.sig, t, sub)
        if not r.ground:
            raise UnboundVariable('unbound variable in condition: %s' % ', '.join(
                sorted(v.name for v in r.variables())))
        return r

    def solve_cond(self, cond, sub, start=0, rw=None):
        """Extensions of sub satisfying cond[start:], left to right.

        rw handles rewriting fragments: rw(frag, sub) yields extended
        substitutions.  Without it, rewriting fragments use unrestricted search.
        """
        if start == len(cond):
            yield sub
            return
        frag = cond[start]
        k = frag[0]
        sig = self.sig
        if k == 'bool':
            if self.reduce(self._inst(frag[1], sub)) is sig.true:
                yield from self.solve_cond(cond, sub, start + 1, rw)
        elif k == 'eq':
            if self.reduce(self._inst(frag[1], sub)) is self.reduce(self._inst(frag[2], sub)):
                yield from self.solve_cond(cond, sub, start + 1, rw)
        elif k == 'match':
            target = self.reduce(self._inst(frag[2], sub))
            seen = set()
            for s2 in match(sig, frag[1], target, sub):
                key = frozenset(s2.items())
                if key in seen:
                    continue
                seen.add(key)
                yield from self.solve_cond(cond, s2, start + 1, rw)
        elif k == 'sort':
            t = self.reduce(self._inst(frag[1], sub))
            if frag[2] in t.sort.supers:
                yield from self.solve_cond(cond, sub, start + 1, rw)
        elif k == 'rw':
            gen = rw(frag, sub) if rw is not None else self._rw_search(frag, sub)
            for s2 in gen:
                yield from self.solve_cond(cond, s2, start + 1, rw)
        else:
            raise ValueError(k)

    def check_eq_condition(self, cond, sub):
        """All extensions of sub under which an equational condition holds."""
        out = []
        seen = set()
        for s in self.solve_cond(cond, dict(sub)):
            key = frozenset(s.items())
            if key not in seen:
                seen.add(key)
                out.append(s)
        return out

    def _rw_search(self, frag, sub):
        start = self.reduce(self._inst(frag[1], sub))
        for state in self._reachable(start):
            yield from match(self.sig, frag[2], state, sub)

    def _reachable(self, start):
        seen = {start}
        queue = deque([start])
        while queue:
            t = queue.popleft()
            yield t
            for u, _ in self.iter_rewrites(None, (), t, False):
                if u not in seen:
                    seen.add(u)
                    if len(seen) > self.state_limit:
                        raise LimitExceeded('state limit (%d) exceeded' % self.state_limit)
                    queue.append(u)

    # rules

    def select_rules(self, label):
        if label is None:
            return [r for r in self.module.rules if not r.nonexec]
        return self.module.rules_by_label.get(label, [])

    def rule_matches(self, rule, sub0, t, top):
        """(substitution, context chain) pairs of a rule's left-hand side in t."""
        sig = self.sig
        if top:
            return match_ext_raw(sig, rule.lhs, t, sub0)
        return match_anywhere_raw(sig, rule.lhs, t, sub0)

    def finish(self, rule, sub, ctx):
        """Result of a rule application; None if the right-hand side stays open."""
        rhs = apply_subst(self.sig, rule.rhs, sub)
        if not rhs.ground:
            return None
        self.rewrites += 1
        return self.reduce(rebuild(self.sig, ctx, rhs))

    def iter_rewrites(self, label, pairs, t, top, rw=None):
        """Lazily enumerate (result, rule) one-step rewrites of t.

        Labelled applications skip rules with rewriting fragments unless rw
        is given; `all` (label None) evaluates them by search.
        """
        for rule in self.select_rules(label):
            if label is not None and rule.n_rw and rw is None:
                continue
            sub0 = initial_subst(rule, pairs)
            if sub0 is None:
                continue
            for sub, ctx in self.rule_matches(rule, sub0, t, top):
                for s2 in self.solve_cond(rule.cond, sub, 0, rw):
                    r = self.finish(rule, s2, ctx)
                    if r is not None:
                        yield r, rule

    def one_step_rewrites(self, label, pairs, t, top=False):
        out = []
        seen = set()
        for r, rule in self.iter_rewrites(label, pairs, t, top):
            if r not in seen:
                seen.add(r)
                out.append((r, rule))
        return out

    # commands

    def search(self, t, pattern, cond=(), bound=None):
        """Breadth-first =>* search; yields (state, substitution, state number)."""
        start = self.reduce(t)
        found = 0
        for n, state in enumerate(self._reachable(start)):
            seen = set()
            for sub in match(self.sig, pattern, state, {}):
                key = frozenset(sub.items())
                if key in seen:
                    continue
                seen.add(key)
                for s2 in self.solve_cond(cond, sub):
                    yield state, s2, n
                    found += 1
                    if bound is not None and found >= bound:
                        return
                    break

    def rewrite(self, t, bound=None):
        """Apply the first available rule rewrite repeatedly; returns (term, steps)."""
        u = self.reduce(t)
        steps = 0
        while bound is None or steps < bound:
            nxt = next(self.iter_rewrites(None, (), u, False), None)
            if nxt is None:
                break
            u = nxt[0]
            steps += 1
            if steps > self.state_limit and bound is None:
                raise LimitExceeded('state limit (%d) exceeded' % self.state_limit)
        return u, steps
