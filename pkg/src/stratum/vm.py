"""Strategy execution with processes and tasks.

A process advances one execution path: a subject term plus a persistent
stack of pending strategy frames.  Tasks group the processes of a
subsearch (a conditional's guard, a rewriting condition, a matchrew
subterm, a `one`) and hold what to do with their results.  Each task keeps
the set of (term, stack) states already scheduled in it, which cuts cycles.

The fair scheduler runs processes round-robin, one step each; the
depth-first one keeps them on a stack.
"""

from collections import deque
from itertools import product

from . import strategy as S
from .equational import DEFAULT_STATE_LIMIT, LimitExceeded, initial_subst
from .matching import match, match_anywhere_raw, match_ext_raw, rebuild
from .terms import apply_subst


class Env(dict):
    """Hashable, never mutated substitution."""
    __slots__ = ('_h',)

    def __hash__(self):
        h = self._h
        if h is None:
            h = self._h = hash(frozenset(self.items()))
        return h

    def __new__(cls, *a, **k):
        e = dict.__new__(cls)
        e._h = None
        return e


EMPTY_ENV = Env()


class Frame:
    __slots__ = ('strat', 'env', 'parent')

    def __init__(self, strat, env, parent):
        self.strat = strat
        self.env = env
        self.parent = parent

    def __repr__(self):
        out = []
        f = self
        while f is not None:
            out.append(S.strat_str(f.strat))
            f = f.parent
        return '[%s]' % ' :: '.join(out)


# tasks

class Task:
    __slots__ = ('vm', 'parent', 'visited', 'pending', 'closed', 'dead', 'children')

    def __init__(self, vm, parent):
        self.vm = vm
        self.parent = parent
        self.visited = set()
        self.pending = 0
        self.closed = False
        self.dead = False
        self.children = []
        if parent is not None:
            parent.pending += 1
            parent.children.append(self)

    def on_solution(self, t):
        raise NotImplementedError

    def on_exhausted(self):
        pass

    def release(self):
        if self.closed:
            return
        self.pending -= 1
        if self.pending == 0:
            self.closed = True
            self.children = []
            self.on_exhausted()
            if self.parent is not None:
                self.parent.release()

    def check_idle(self):
        if self.pending == 0 and not self.closed:
            self.pending = 1
            self.release()

    def kill(self):
        if self.closed:
            return
        self._mark_dead()
        if self.parent is not None:
            self.parent.release()

    def _mark_dead(self):
        self.closed = True
        self.dead = True
        for c in self.children:
            c._mark_dead()
        self.children = []


class RootTask(Task):
    __slots__ = ()

    def on_solution(self, t):
        self.vm._emit(t)


class BranchTask(Task):
    """Guard of a conditional.  mode: 'cond', 'not' or 'test'."""
    __slots__ = ('mode', 'term', 'then', 'other', 'env', 'rest', 'found')

    def __init__(self, vm, parent, mode, term, then, other, env, rest):
        super().__init__(vm, parent)
        self.mode = mode
        self.term = term
        self.then = then
        self.other = other
        self.env = env
        self.rest = rest
        self.found = False

    def on_solution(self, t):
        # the guard keeps searching after its first solution, as its expansion
        # into a plain conditional would: a divergent guard must not terminate
        vm = self.vm
        first = not self.found
        self.found = True
        if self.mode == 'not':
            return
        if self.mode == 'test':
            if first:
                vm.state(self.parent, self.term, self.rest)
        else:
            st = self.rest if self.then is None else vm.push(self.then, self.env, self.rest)
            vm.state(self.parent, t, st)

    def on_exhausted(self):
        if self.found or self.mode == 'test':
            return
        vm = self.vm
        st = self.rest if self.other is None else vm.push(self.other, self.env, self.rest)
        vm.state(self.parent, self.term, st)


class OneTask(Task):
    __slots__ = ('rest',)

    def __init__(self, vm, parent, rest):
        super().__init__(vm, parent)
        self.rest = rest

    def on_solution(self, t):
        self.vm.state(self.parent, t, self.rest)
        self.kill()


class RwCond:
    """Evaluation of a rule's condition whose rewriting fragments follow strategies."""
    __slots__ = ('vm', 'owner', 'rule', 'ctx', 'strats', 'env', 'rest')

    def __init__(self, vm, owner, rule, ctx, strats, env, rest):
        self.vm = vm
        self.owner = owner
        self.rule = rule
        self.ctx = ctx
        self.strats = strats
        self.env = env
        self.rest = rest

    def advance(self, sub, i):
        vm = self.vm
        eng = vm.engine
        cond = self.rule.cond
        j = i
        while j < len(cond) and cond[j][0] != 'rw':
            j += 1
        for s2 in eng.solve_cond(cond[:j], sub, i):
            if self.owner.closed:
                return
            if j == len(cond):
                u = eng.finish(self.rule, s2, self.ctx)
                if u is not None:
                    vm.count_state()
                    vm.state(self.owner, u, self.rest)
                continue
            k = sum(1 for f in cond[:j] if f[0] == 'rw')
            lhs = eng.reduce(eng._inst(cond[j][1], s2))
            child = RwFragTask(vm, self.owner, self, s2, j)
            vm.state(child, lhs, vm.push(self.strats[k], self.env, None))
            child.check_idle()


class RwFragTask(Task):
    __slots__ = ('cont', 'sub', 'index', 'seen')

    def __init__(self, vm, parent, cont, sub, index):
        super().__init__(vm, parent)
        self.cont = cont
        self.sub = sub
        self.index = index
        self.seen = set()

    def on_solution(self, t):
        if t in self.seen:
            return
        self.seen.add(t)
        frag = self.cont.rule.cond[self.index]
        done = set()
        for s2 in match(self.vm.sig, frag[2], t, self.sub):
            key = frozenset(s2.items())
            if key not in done:
                done.add(key)
                self.cont.advance(s2, self.index + 1)


class Join:
    """Per-variable result tables of one matchrew match; emits every combination."""
    __slots__ = ('vm', 'owner', 'rest', 'pattern', 'vars', 'sub', 'ctx', 'tables')

    def __init__(self, vm, owner, rest, pattern, vars, sub, ctx):
        self.vm = vm
        self.owner = owner
        self.rest = rest
        self.pattern = pattern
        self.vars = vars
        self.sub = sub
        self.ctx = ctx
        self.tables = [[] for _ in vars]

    def add(self, i, t):
        tab = self.tables[i]
        if t in tab:
            return
        tab.append(t)
        if any(not x for k, x in enumerate(self.tables) if k != i):
            return
        vm = self.vm
        pools = [x if k != i else [t] for k, x in enumerate(self.tables)]
        for combo in product(*pools):
            sub = dict(self.sub)
            for v, val in zip(self.vars, combo):
                sub[v] = val
            filled = apply_subst(vm.sig, self.pattern, sub)
            u = vm.engine.reduce(rebuild(vm.sig, self.ctx, filled))
            vm.state(self.owner, u, self.rest)


class SubtermTask(Task):
    __slots__ = ('join', 'index')

    def __init__(self, vm, parent, join, index):
        super().__init__(vm, parent)
        self.join = join
        self.index = index

    def on_solution(self, t):
        self.join.add(self.index, t)


# processes

class Decomp:
    __slots__ = ('task', 'term', 'stack')
    is_gen = False

    def __init__(self, task, term, stack):
        self.task = task
        self.term = term
        self.stack = stack


class GenProc:
    __slots__ = ('task', 'it')
    is_gen = True

    def __init__(self, task, it):
        self.task = task
        self.it = it


class VM:
    def __init__(self, module, depth_first=False, state_limit=DEFAULT_STATE_LIMIT, dedup=True,
                 engine=None):
        self.module = module
        self.sig = module.sig
        self.engine = engine or module.engine
        self.depth_first = depth_first
        self.state_limit = state_limit
        self.dedup = dedup
        self.states = 0
        self.queue = deque()
        self._frames = {}
        self._envs = {}
        self._derived = {}
        self._out = deque()
        self._seen = set()

    # bookkeeping

    def count_state(self):
        self.states += 1
        if self.states > self.state_limit:
            raise LimitExceeded('state limit (%d) exceeded' % self.state_limit)

    def env(self, sub):
        if not sub:
            return EMPTY_ENV
        key = frozenset(sub.items())
        e = self._envs.get(key)
        if e is None:
            e = Env(sub)
            self._envs[key] = e
        return e

    def push(self, strat, env, parent):
        key = (strat, env, parent)
        f = self._frames.get(key)
        if f is None:
            f = Frame(strat, env, parent)
            self._frames[key] = f
        return f

    def _derive(self, node, make):
        d = self._derived.get(node)
        if d is None:
            d = self._derived[node] = make()
        return d

    def _emit(self, t):
        if self.dedup:
            if t in self._seen:
                return
            self._seen.add(t)
        self._out.append(t)

    def state(self, task, t, stack):
        """Schedule term t with pending stack in task (cycle check included)."""
        if task.closed:
            return
        if stack is None:
            task.on_solution(t)
            return
        key = (t, stack)
        if key in task.visited:
            return
        task.visited.add(key)
        task.pending += 1
        self._schedule([Decomp(task, t, stack)])

    def _schedule(self, procs):
        if self.depth_first:
            self.queue.extend(reversed(procs))
        else:
            self.queue.extend(procs)

    def _add_gen(self, task, it):
        task.pending += 1
        self._schedule([GenProc(task, it)])

    # running

    def run(self, term, strat, env=None):
        """Generator of solutions of strat on term."""
        t0 = self.engine.reduce(term)
        root = RootTask(self, None)
        self.state(root, t0, self.push(strat, self.env(env or {}), None))
        root.check_idle()
        queue = self.queue
        out = self._out
        dfs = self.depth_first
        while out:
            yield out.popleft()
        while queue:
            p = queue.pop() if dfs else queue.popleft()
            task = p.task
            if task.dead:
                continue
            mark = len(queue)
            if p.is_gen:
                try:
                    next(p.it)
                    alive = True
                except StopIteration:
                    alive = False
            else:
                alive = self._step(p)
            if alive:
                if dfs and p.is_gen:
                    queue.insert(mark, p)
                elif dfs:
                    queue.append(p)
                else:
                    queue.append(p)
            else:
                task.release()
            while out:
                yield out.popleft()

    def _goto(self, p, t, stack):
        """Move process p to a new state; False if the state was seen or finished."""
        task = p.task
        if stack is None:
            task.on_solution(t)
            return False
        key = (t, stack)
        if key in task.visited:
            return False
        task.visited.add(key)
        p.term = t
        p.stack = stack
        return True

    def _step(self, p):
        t = p.term
        fr = p.stack
        s = fr.strat
        env = fr.env
        rest = fr.parent
        task = p.task
        cls = s.__class__
        if cls is S.Idle:
            return self._goto(p, t, rest)
        if cls is S.Fail:
            return False
        if cls is S.Seq:
            st = rest
            for part in reversed(s.parts):
                st = self.push(part, env, st)
            return self._goto(p, t, st)
        if cls is S.Alt:
            states = [self.push(part, env, rest) for part in s.parts]
            return self._fork(p, t, states)
        if cls is S.Star:
            return self._fork(p, t, [rest, self.push(s.arg, env, self.push(s, env, rest))])
        if cls is S.Plus:
            star = self._derive(s, lambda: S.Star(s.arg))
            return self._goto(p, t, self.push(s.arg, env, self.push(star, env, rest)))
        if cls is S.Bang:
            star, neg = self._derive(s, lambda: (S.Star(s.arg), S.Not(s.arg)))
            return self._goto(p, t, self.push(star, env, self.push(neg, env, rest)))
        if cls is S.RuleApp:
            self._add_gen(task, self._app_gen(task, t, rest, s, env))
            return False
        if cls is S.Call:
            return self._call(p, t, rest, s, env)
        if cls is S.Test:
            return self._goto(p, t, rest) if self._test(s, t, env) else False
        if cls is S.Cond:
            self._branch(task, 'cond', t, s.cond, s.then, s.other, env, rest)
            return False
        if cls is S.OrElse:
            self._branch(task, 'cond', t, s.first, None, s.second, env, rest)
            return False
        if cls is S.Try:
            self._branch(task, 'cond', t, s.arg, None, None, env, rest)
            return False
        if cls is S.Not:
            self._branch(task, 'not', t, s.arg, None, None, env, rest)
            return False
        if cls is S.TestOp:
            self._branch(task, 'test', t, s.arg, None, None, env, rest)
            return False
        if cls is S.One:
            child = OneTask(self, task, rest)
            self.state(child, t, self.push(s.arg, env, None))
            child.check_idle()
            return False
        if cls is S.MatchRew:
            self._add_gen(task, self._mrew_gen(task, t, rest, s, env))
            return False
        raise TypeError('unknown strategy node %r' % s)

    def _fork(self, p, t, stacks):
        task = p.task
        first, others = stacks[0], stacks[1:]
        procs = []
        for st in others:
            if st is None:
                task.on_solution(t)
                continue
            key = (t, st)
            if key in task.visited:
                continue
            task.visited.add(key)
            task.pending += 1
            procs.append(Decomp(task, t, st))
        alive = self._goto(p, t, first)
        if procs:
            self._schedule(procs)
        return alive

    def _branch(self, task, mode, t, guard, then, other, env, rest):
        child = BranchTask(self, task, mode, t, then, other, env, rest)
        self.state(child, t, self.push(guard, env, None))
        child.check_idle()

    def _test(self, s, t, env):
        sig = self.sig
        sub0 = dict(env)
        if s.mode == 'match':
            subs = match(sig, s.pattern, t, sub0)
        elif s.mode == 'xmatch':
            subs = (r for r, _ in match_ext_raw(sig, s.pattern, t, sub0))
        else:
            subs = (r for r, _ in match_anywhere_raw(sig, s.pattern, t, sub0))
        eng = self.engine
        for sub in subs:
            for _ in eng.solve_cond(s.cond, sub):
                return True
        return False

    def _inst_reduce(self, term, env):
        return self.engine.reduce(apply_subst(self.sig, term, env))

    def _app_gen(self, task, t, rest, ra, env):
        eng = self.engine
        pairs = [(n, self._inst_reduce(v, env)) for n, v in ra.subst]
        for rule in eng.select_rules(ra.label):
            if ra.label is not None and rule.n_rw != len(ra.strats):
                continue
            sub0 = initial_subst(rule, pairs)
            if sub0 is None:
                continue
            if ra.label is None or rule.n_rw == 0:
                for sub, ctx in eng.rule_matches(rule, sub0, t, ra.top):
                    for s2 in eng.solve_cond(rule.cond, sub):
                        u = eng.finish(rule, s2, ctx)
                        if u is None:
                            continue
                        self.count_state()
                        self.state(task, u, rest)
                        yield
            else:
                for sub, ctx in eng.rule_matches(rule, sub0, t, ra.top):
                    RwCond(self, task, rule, ctx, ra.strats, env, rest).advance(sub, 0)
                    yield

    def _call(self, p, t, rest, call, env):
        decl = self.module.strats[(call.name, len(call.args))]
        defs = decl.defs
        if not call.args and len(defs) == 1 and not defs[0].cond:
            # a single unconditional definition without parameters is inlined
            self.count_state()
            return self._goto(p, t, self.push(defs[0].body, EMPTY_ENV, rest))
        self._add_gen(p.task, self._call_gen(p.task, t, rest, call, env, decl))
        return False

    def _call_gen(self, task, t, rest, call, env, decl):
        eng = self.engine
        args = [self._inst_reduce(a, env) for a in call.args]
        tup = self.sig.make(decl.tuple_sym, args)
        parameterless = not call.args
        for d in decl.defs:
            seen = set()
            for sub in match(self.sig, d.lhs, tup, {}):
                for s2 in eng.solve_cond(d.cond, sub):
                    key = frozenset(s2.items())
                    if key in seen:
                        continue
                    seen.add(key)
                    self.count_state()
                    denv = self.env(s2)
                    if parameterless:
                        frame = self.push(d.body, denv, rest)
                    else:
                        # parameterized calls are never cycle-checked: every state
                        # of the body sits above a fresh, uninterned return frame
                        frame = self.push(d.body, denv, Frame(S.IDLE, EMPTY_ENV, rest))
                    self.state(task, t, frame)
                    yield

    def _mrew_gen(self, task, t, rest, mr, env):
        sig = self.sig
        eng = self.engine
        sub0 = dict(env)
        if mr.mode == 'match':
            pairs = ((r, None) for r in match(sig, mr.pattern, t, sub0))
        elif mr.mode == 'xmatch':
            pairs = match_ext_raw(sig, mr.pattern, t, sub0)
        else:
            pairs = match_anywhere_raw(sig, mr.pattern, t, sub0)
        seen = set()
        targets = [v for v, _ in mr.pairs]
        for sub, ctx in pairs:
            for s2 in eng.solve_cond(mr.cond, sub):
                key = (frozenset(s2.items()), rebuild(sig, ctx, sig.hole))
                if key in seen:
                    continue
                seen.add(key)
                join = Join(self, task, rest, mr.pattern, targets, s2, ctx)
                senv = self.env(s2)
                for i, (v, strat) in enumerate(mr.pairs):
                    child = SubtermTask(self, task, join, i)
                    self.state(child, s2[v], self.push(strat, senv, None))
                    child.check_idle()
                yield


def srewrite(module, term, strat, bound=None, depth_first=False, **kw):
    vm = VM(module, depth_first=depth_first, **kw)
    out = []
    for u in vm.run(term, strat):
        out.append(u)
        if bound is not None and len(out) >= bound:
            break
    return out


def dsrewrite(module, term, strat, bound=None, **kw):
    return srewrite(module, term, strat, bound, depth_first=True, **kw)
