"""Interpreter sessions: loading modules and running commands.

Every command produces a `Record`; `render` turns it into transcript text
and `Record.as_json` into a plain dict.  Solution streams of srewrite and
dsrewrite stay open so that `continue` can draw more solutions.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path

from .equational import DEFAULT_EQ_LIMIT, DEFAULT_STATE_LIMIT, LimitExceeded, UnboundVariable
from .lexer import ParseError
from .module import Registry
from .parser import COMMAND_KW, split_top, top_level_positions
from .terms import SortError, term_str
from .vm import VM

REDUCE = {'reduce', 'red'}
REWRITE = {'rewrite', 'rew'}
SREW = {'srewrite', 'srew'}
DSREW = {'dsrewrite', 'dsrew'}
CONTINUE = {'continue', 'cont'}
ARROWS = ('=>*', '=>+', '=>!', '=>1')


class CommandError(Exception):
    pass


@dataclass
class Solution:
    term: str
    sort: str
    rewrites: int = 0
    state: int = None
    bindings: dict = None


@dataclass
class Record:
    command: str
    kind: str
    module: str = None
    solutions: list = field(default_factory=list)
    # True when the search ran to its end; False when cut by a bound
    complete: bool = True
    first: bool = True
    rewrites: int = 0
    states: int = None
    error: str = None
    info: str = None
    seconds: float = 0.0

    def as_json(self):
        return {
            'command': self.command,
            'kind': self.kind,
            'module': self.module,
            'solutions': [s.term for s in self.solutions],
            'bindings': [s.bindings for s in self.solutions] if self.kind == 'search' else None,
            'complete': self.complete,
            'rewrites': self.rewrites,
            'error': self.error,
            'warning': self.info if self.kind in ('srewrite', 'dsrewrite') else None,
        }


class _Stream:
    def __init__(self, kind, module, it, engine, found=0):
        self.kind = kind
        self.module = module
        self.it = it
        self.engine = engine
        self.found = found
        self.done = False


def _bound(toks, i):
    """Optional [n] at toks[i:]; returns (n or None, next index)."""
    # anything else in brackets starts the term, as in [0, 0, 5]
    if i + 2 < len(toks) and toks[i].text == '[' and toks[i + 2].text == ']' \
            and toks[i + 1].text.isdigit():
        return int(toks[i + 1].text), i + 3
    return None, i


def _text(toks):
    return ' '.join(t.text for t in toks)


class Session:
    def __init__(self, eq_limit=DEFAULT_EQ_LIMIT, state_limit=DEFAULT_STATE_LIMIT, dedup=True):
        self.registry = Registry()
        self.current = None
        self.eq_limit = eq_limit
        self.state_limit = state_limit
        self.dedup = dedup
        self.stream = None
        self.loaded = []

    # loading

    def load_text(self, text, origin=None):
        """Register modules and run commands found in text; returns the records."""
        try:
            items = split_top(text)
        except ParseError as e:
            where = '%s: ' % origin if origin else ''
            return [Record(command='load %s' % (origin or '<text>'), kind='load', error=where + str(e))]
        out = []
        for kind, item in items:
            if kind == 'module':
                out.extend(self._add_module(item, origin))
            else:
                out.append(self.run_tokens(item))
        return out

    def load_file(self, path):
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as e:
            return [Record(command='load %s' % path, kind='load', error=str(e))]
        return self.load_text(text, str(p))

    def _add_module(self, src, origin):
        reg = self.registry
        old = reg.sources.get(src.name)
        reg.add(src)
        try:
            reg.get(src.name)
        except (ParseError, SortError, KeyError, ValueError) as e:
            # only the offending module is dropped
            if old is None:
                del reg.sources[src.name]
            else:
                reg.sources[src.name] = old
            reg.cache.clear()
            where = '%s: ' % origin if origin else ''
            return [Record(command='module %s' % src.name, kind='load',
                           error='%smodule %s: %s' % (where, src.name, e))]
        self.current = src.name
        self.loaded.append(src.name)
        return []

    # commands

    def run(self, text):
        """Run the commands (and module declarations) of a text."""
        return self.load_text(text)

    def run_tokens(self, toks):
        cmd = _text(toks) + ' .'
        kw = toks[0].text
        t0 = time.perf_counter()
        try:
            rec = self._dispatch(kw, toks, cmd)
        except (CommandError, ParseError, SortError, UnboundVariable, LimitExceeded, KeyError) as e:
            msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
            rec = Record(command=cmd, kind=kw, error=msg)
        rec.seconds = time.perf_counter() - t0
        return rec

    def _dispatch(self, kw, toks, cmd):
        if kw == 'load':
            if len(toks) != 2:
                raise CommandError('usage: load <file> .')
            recs = self.load_file(toks[1].text)
            errors = [r.error for r in recs if r.error]
            return Record(command=cmd, kind='load', error='; '.join(errors) or None,
                          info='loaded %s' % toks[1].text)
        if kw == 'select':
            if len(toks) != 2:
                raise CommandError('usage: select <module> .')
            self.module(toks[1].text)
            self.current = toks[1].text
            return Record(command=cmd, kind='select', module=self.current)
        if kw == 'show':
            return Record(command=cmd, kind='show',
                          info=' '.join(n for n in self.registry.names()))
        if kw in CONTINUE:
            return self._continue(toks, cmd)
        bound, i = _bound(toks, 1)
        name, i = self._in_module(toks, i)
        m = self.module(name)
        eng = m.engine
        eng.eq_limit = self.eq_limit
        eng.state_limit = self.state_limit
        eng.reset_counters()
        body = toks[i:]
        if not body:
            raise CommandError('missing term')
        if kw in REDUCE:
            return self._reduce(m, body, cmd)
        if kw in REWRITE:
            return self._rewrite(m, body, bound, cmd)
        if kw == 'search':
            return self._search(m, body, bound, cmd)
        if kw in SREW or kw in DSREW:
            return self._srewrite(m, body, bound, kw in DSREW, cmd)
        raise CommandError('unknown command %s' % kw)

    def module(self, name=None):
        name = name or self.current
        if name is None:
            raise CommandError('no module loaded')
        try:
            return self.registry.get(name)
        except KeyError:
            raise CommandError('no module %s' % name)

    def _in_module(self, toks, i):
        if i < len(toks) and toks[i].text == 'in':
            if i + 2 >= len(toks) or toks[i + 2].text != ':':
                raise CommandError('expected "in <module> :"')
            return toks[i + 1].text, i + 3
        return self.current, i

    def _solution(self, t, rewrites=0, **kw):
        return Solution(term_str(t), t.sort.name, rewrites, **kw)

    def _reduce(self, m, body, cmd):
        eng = m.engine
        t = eng.reduce(m.parse_term(body))
        return Record(command=cmd, kind='reduce', module=m.name,
                      solutions=[self._solution(t, eng.eq_steps)], rewrites=eng.eq_steps)

    def _rewrite(self, m, body, bound, cmd):
        eng = m.engine
        t, steps = eng.rewrite(m.parse_term(body), bound)
        return Record(command=cmd, kind='rewrite', module=m.name,
                      solutions=[self._solution(t, eng.rewrites)], rewrites=eng.rewrites)

    def _search(self, m, body, bound, cmd):
        eng = m.engine
        cut = top_level_positions(body, set(ARROWS))
        if not cut:
            raise CommandError('search needs one of %s' % ' '.join(ARROWS))
        k = cut[0]
        arrow = body[k].text
        rest = body[k + 1:]
        st = top_level_positions(rest, {'s.t.', 'such'})
        cond = ()
        if st:
            j = st[0]
            skip = 2 if rest[j].text == 'such' else 1
            cond = m.parse_condition(rest[j + skip:])
            rest = rest[:j]
        start = eng.reduce(m.parse_term(body[:k]))
        pattern = m.parse_term(rest)
        rec = Record(command=cmd, kind='search', module=m.name)
        count = 0
        self._visited = 0
        for n, state, sub in self._search_states(eng, start, arrow, pattern, cond):
            bindings = {'%s:%s' % (v.name, v.sort.name): term_str(x)
                        for v, x in sorted(sub.items(), key=lambda kv: kv[0].name)}
            rec.solutions.append(self._solution(state, eng.rewrites, state=n, bindings=bindings))
            count += 1
            if bound is not None and count >= bound:
                rec.complete = False
                break
        rec.rewrites = eng.rewrites
        rec.states = self._visited
        return rec

    def _search_states(self, eng, start, arrow, pattern, cond):
        from .matching import match
        sig = eng.sig
        if arrow == '=>1':
            states = enumerate([start] + [u for u, _ in eng.one_step_rewrites(None, (), start)])
        else:
            states = enumerate(eng._reachable(start))
        for n, state in states:
            self._visited = n + 1
            if arrow in ('=>+', '=>1') and n == 0:
                continue
            if arrow == '=>!' and next(eng.iter_rewrites(None, (), state, False), None) is not None:
                continue
            seen = set()
            for sub in match(sig, pattern, state, {}):
                key = frozenset(sub.items())
                if key in seen:
                    continue
                seen.add(key)
                for s2 in eng.solve_cond(cond, sub):
                    yield n, state, s2
                    break

    def _srewrite(self, m, body, bound, depth_first, cmd):
        cut = top_level_positions(body, {'using'})
        if not cut:
            raise CommandError('expected "using"')
        k = cut[0]
        t = m.parse_term(body[:k])
        strat = m.parse_strategy(body[k + 1:])
        vm = VM(m, depth_first=depth_first, state_limit=self.state_limit, dedup=self.dedup)
        kind = 'dsrewrite' if depth_first else 'srewrite'
        self.stream = _Stream(kind, m, vm.run(t, strat), m.engine)
        rec = Record(command=cmd, kind=kind, module=m.name)
        warnings = m.check_strategy(strat)
        if warnings:
            rec.info = '; '.join(warnings)
        self._pull(rec, bound)
        return rec

    def _pull(self, rec, n):
        s = self.stream
        eng = s.engine
        try:
            while n is None or len(rec.solutions) < n:
                t = next(s.it, None)
                if t is None:
                    s.done = True
                    break
                s.found += 1
                rec.solutions.append(self._solution(t, eng.rewrites))
        except LimitExceeded as e:
            s.done = True
            rec.error = str(e)
        rec.complete = s.done
        rec.rewrites = eng.rewrites

    def _continue(self, toks, cmd):
        if len(toks) > 2 or (len(toks) == 2 and not toks[1].text.isdigit()):
            raise CommandError('usage: continue <n> .')
        n = int(toks[1].text) if len(toks) == 2 else 1
        s = self.stream
        if s is None:
            raise CommandError('no open command to continue')
        rec = Record(command=cmd, kind='continue', module=s.module.name, first=False)
        if s.done:
            return rec
        base = s.found
        self._pull(rec, n)
        rec.states = base
        return rec


# transcript rendering

def render(rec):
    """Transcript text of a record, shaped like an interactive session."""
    lines = []
    if rec.kind in ('srewrite', 'dsrewrite') and rec.info:
        lines.append('Warning: %s' % rec.info)
    if rec.kind in ('srewrite', 'dsrewrite', 'continue'):
        base = rec.states if rec.kind == 'continue' and rec.states else 0
        for k, s in enumerate(rec.solutions, base + 1):
            lines += ['', 'Solution %d' % k, 'rewrites: %d' % s.rewrites,
                      'result %s: %s' % (s.sort, s.term)]
        if rec.complete and not rec.error:
            lines += ['', 'No solution.' if rec.first and not rec.solutions else 'No more solutions.',
                      'rewrites: %d' % rec.rewrites]
    elif rec.kind == 'search':
        for k, s in enumerate(rec.solutions, 1):
            lines += ['', 'Solution %d (state %d)' % (k, s.state),
                      'states: %d  rewrites: %d' % (s.state + 1, s.rewrites)]
            lines += ['%s --> %s' % kv for kv in s.bindings.items()] or ['empty substitution']
        if rec.complete and not rec.error:
            lines += ['', 'No solution.' if not rec.solutions else 'No more solutions.',
                      'states: %d  rewrites: %d' % (rec.states or 0, rec.rewrites)]
    elif rec.kind in ('reduce', 'rewrite'):
        s = rec.solutions[0] if rec.solutions else None
        if s is not None:
            lines += ['rewrites: %d' % rec.rewrites, 'result %s: %s' % (s.sort, s.term)]
    elif rec.info:
        lines.append(rec.info)
    if rec.error:
        lines.append('Error: %s' % rec.error)
    return '\n'.join(lines).lstrip('\n')


def is_command(word):
    return word in COMMAND_KW
