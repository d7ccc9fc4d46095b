"""Surface syntax: module texts, mixfix terms, conditions and strategies.

Terms are parsed in two phases.  A precedence-climbing pass over the token
stream builds a syntax tree of operator names; a second pass resolves every
name against the signature, keeping only kind-consistent readings.
"""

import itertools

from .lexer import ParseError, Token, is_number, is_qid, tokenize
from .terms import ANY, SortError
from . import strategy as S

MAX_PREC = 10 ** 9
MODULE_KW = {'fmod': 'endfm', 'mod': 'endm', 'smod': 'endsm'}
UNSUPPORTED_KW = {'fth', 'th', 'sth', 'view', 'omod'}
IMPORT_KW = {'protecting', 'pr', 'including', 'inc', 'extending', 'ex', 'generated-by'}
STMT_ATTRS = {'owise', 'otherwise', 'nonexec', 'label', 'metadata', 'print', 'variant'}
COMMAND_KW = {'reduce', 'red', 'rewrite', 'rew', 'search', 'srewrite', 'srew', 'dsrewrite',
              'dsrew', 'continue', 'cont', 'select', 'load', 'show'}


def _err(msg, tok):
    if tok is None:
        return ParseError(msg)
    return ParseError(msg, tok.line, tok.col)


# --- module level ---------------------------------------------------------

class OpDecl:
    __slots__ = ('name', 'args', 'result', 'attrs', 'tok')

    def __init__(self, name, args, result, attrs, tok):
        self.name = name
        self.args = args
        self.result = result
        self.attrs = attrs
        self.tok = tok


class ModuleSource:
    """A module as written: declarations by kind, statements as raw tokens."""

    def __init__(self, kind, name, tok):
        self.kind = kind
        self.name = name
        self.tok = tok
        self.imports = []
        self.sorts = []
        self.subsorts = []
        self.ops = []
        self.vars = {}
        self.stmts = []
        self.strats = []

    def __repr__(self):
        return '<%s %s>' % (self.kind, self.name)


class Statement:
    __slots__ = ('kind', 'tokens', 'attrs', 'tok')

    def __init__(self, kind, tokens, attrs, tok):
        self.kind = kind
        self.tokens = tokens
        self.attrs = attrs
        self.tok = tok


def _split_statements(toks, i, end_kw, mod_tok):
    """Token lists of the statements of a module body, up to its end keyword."""
    out = []
    cur = []
    while True:
        if i >= len(toks):
            raise _err('missing %s for module' % end_kw, mod_tok)
        t = toks[i]
        if not cur and t.text == end_kw:
            return out, i + 1
        if not cur and t.text in MODULE_KW.values():
            raise _err('unexpected %s' % t.text, t)
        if t.text == '.':
            if not cur:
                raise _err('empty statement', t)
            out.append(cur)
            cur = []
        else:
            cur.append(t)
        i += 1


def _strip_attrs(toks):
    """Split a trailing [attribute list] off a statement."""
    if not toks or toks[-1].text != ']':
        return toks, {}
    depth = 0
    for j in range(len(toks) - 1, -1, -1):
        t = toks[j].text
        if t == ']':
            depth += 1
        elif t == '[':
            depth -= 1
            if depth == 0:
                break
    else:
        return toks, {}
    inner = toks[j + 1:-1]
    if not inner or inner[0].text not in STMT_ATTRS:
        return toks, {}
    attrs = {}
    k = 0
    while k < len(inner):
        w = inner[k].text
        if w in ('owise', 'otherwise'):
            attrs['owise'] = True
        elif w == 'nonexec':
            attrs['nonexec'] = True
        elif w in ('label', 'metadata', 'print') and k + 1 < len(inner):
            attrs[w] = inner[k + 1].text
            k += 1
        elif w == 'variant':
            pass
        else:
            raise _err('unknown statement attribute %s' % w, inner[k])
        k += 1
    return toks[:j], attrs


def _parse_op_attrs(toks):
    attrs = {}
    k = 0
    while k < len(toks):
        w = toks[k].text
        if w in ('assoc', 'comm', 'ctor', 'special'):
            attrs[w] = True
        elif w == 'id:':
            if k + 1 >= len(toks):
                raise _err('identity element expected', toks[k])
            attrs['id'] = toks[k + 1].text
            k += 1
        elif w == 'prec':
            if k + 1 >= len(toks) or not toks[k + 1].text.isdigit():
                raise _err('precedence value expected', toks[k])
            attrs['prec'] = int(toks[k + 1].text)
            k += 1
        elif w in ('memo', 'frozen', 'iter', 'idem', 'left', 'right', 'config', 'object', 'msg'):
            pass
        elif w in ('gather', 'format', 'strat', 'poly', 'metadata'):
            # skip the argument of attributes this engine ignores
            if k + 1 < len(toks) and toks[k + 1].text == '(':
                depth = 0
                while k + 1 < len(toks):
                    k += 1
                    if toks[k].text == '(':
                        depth += 1
                    elif toks[k].text == ')':
                        depth -= 1
                        if depth == 0:
                            break
            else:
                k += 1
        else:
            raise _err('unsupported operator attribute %s' % w, toks[k])
        k += 1
    return attrs


def _check_plain_sort(tok):
    if '{' in tok.text or tok.text in '{}':
        raise _err('parameterized sorts are not supported; use a monomorphized module', tok)
    return tok.text


def _sort_names(toks):
    out = []
    for t in toks:
        if t.text in ('{', '}'):
            raise _err('parameterized sorts are not supported; use a monomorphized module', t)
        out.append(t.text)
    return out


def _parse_op(src, kw, body, tok):
    body, _ = body, None
    try:
        colon = next(k for k, t in enumerate(body) if t.text == ':')
    except StopIteration:
        raise _err('expected : in operator declaration', tok) from None
    name_toks = body[:colon]
    rest = body[colon + 1:]
    arrow = next((k for k, t in enumerate(rest) if t.text in ('->', '~>')), None)
    if arrow is None:
        raise _err('expected -> in operator declaration', tok)
    args = _sort_names(rest[:arrow])
    tail = rest[arrow + 1:]
    if not tail:
        raise _err('missing result sort', tok)
    result = _sort_names(tail[:1])[0]
    attrs = {}
    if len(tail) > 1:
        if tail[1].text != '[' or tail[-1].text != ']':
            raise _err('malformed attribute list', tail[1])
        attrs = _parse_op_attrs(tail[2:-1])
    if rest[arrow].text == '~>':
        result = '[%s]' % result
    if kw == 'op':
        if not name_toks:
            raise _err('missing operator name', tok)
        names = [''.join(t.text for t in name_toks)]
    else:
        names = []
        k = 0
        while k < len(name_toks):
            t = name_toks[k]
            if t.text == '(':
                depth = 1
                j = k + 1
                while j < len(name_toks) and depth:
                    if name_toks[j].text == '(':
                        depth += 1
                    elif name_toks[j].text == ')':
                        depth -= 1
                    j += 1
                names.append(''.join(x.text for x in name_toks[k + 1:j - 1]))
                k = j
            else:
                names.append(t.text)
                k += 1
    for n in names:
        src.ops.append(OpDecl(n, args, result, attrs, tok))


def _parse_module(toks, i):
    kw = toks[i]
    end_kw = MODULE_KW[kw.text]
    if i + 2 >= len(toks):
        raise _err('truncated module header', kw)
    name = toks[i + 1]
    if toks[i + 2].text == '{':
        raise _err('parameterized modules are not supported; use a monomorphized module', toks[i + 2])
    if toks[i + 2].text != 'is':
        raise _err("expected 'is' after module name", toks[i + 2])
    src = ModuleSource(kw.text, name.text, kw)
    stmts, i = _split_statements(toks, i + 3, end_kw, kw)
    for st in stmts:
        head = st[0]
        w = head.text
        body = st[1:]
        if w in IMPORT_KW:
            if not body:
                raise _err('module name expected', head)
            for t in body:
                if t.text in ('{', '}'):
                    raise _err('parameterized module instances are not supported; '
                               'use a monomorphized module', t)
            if len(body) != 1:
                raise _err('module summation is not supported', body[1])
            src.imports.append((w, body[0].text, body[0]))
        elif w in ('sort', 'sorts'):
            if not body:
                raise _err('sort name expected', head)
            for n in _sort_names(body):
                src.sorts.append((n, head))
        elif w in ('subsort', 'subsorts'):
            chain = [[]]
            for t in body:
                if t.text == '<':
                    chain.append([])
                else:
                    chain[-1].append(_check_plain_sort(t))
            if len(chain) < 2 or any(not c for c in chain):
                raise _err('malformed subsort declaration', head)
            src.subsorts.append((chain, head))
        elif w in ('op', 'ops'):
            _parse_op(src, w, body, head)
        elif w in ('var', 'vars'):
            colon = next((k for k, t in enumerate(body) if t.text == ':'), None)
            if colon is None or colon == 0 or colon != len(body) - 2:
                raise _err('malformed variable declaration', head)
            sort = _check_plain_sort(body[-1])
            for t in body[:colon]:
                src.vars[t.text] = (sort, t)
        elif w in ('eq', 'ceq', 'rl', 'crl', 'sd', 'csd'):
            if w in ('rl', 'crl') and src.kind == 'fmod':
                raise _err('rules are not allowed in functional modules', head)
            if w in ('sd', 'csd') and src.kind != 'smod':
                raise _err('strategy definitions need a strategy module', head)
            toks2, attrs = _strip_attrs(body)
            src.stmts.append(Statement(w, toks2, attrs, head))
        elif w in ('strat', 'strats'):
            if src.kind != 'smod':
                raise _err('strategy declarations need a strategy module', head)
            at = next((k for k, t in enumerate(body) if t.text == '@'), None)
            if at is None or at != len(body) - 2:
                raise _err('malformed strategy declaration', head)
            colon = next((k for k, t in enumerate(body[:at]) if t.text == ':'), None)
            if colon is None:
                names, args = body[:at], []
            else:
                names, args = body[:colon], _sort_names(body[colon + 1:at])
            if not names:
                raise _err('strategy name expected', head)
            subject = _check_plain_sort(body[-1])
            for t in names:
                src.strats.append((t.text, args, subject, t))
        elif w in ('mb', 'cmb'):
            raise _err('membership axioms are not supported', head)
        else:
            raise _err('unknown declaration %s' % w, head)
    return src, i


def split_top(text):
    """Split a source text into ('module', ModuleSource) and ('command', tokens) items."""
    toks = tokenize(text)
    out = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.text in MODULE_KW:
            src, i = _parse_module(toks, i)
            out.append(('module', src))
        elif t.text in UNSUPPORTED_KW:
            raise _err('%s is not supported (theories and views are out of scope)' % t.text, t)
        elif t.text in COMMAND_KW:
            j = i
            while j < len(toks) and toks[j].text != '.':
                j += 1
            if j >= len(toks):
                raise _err('command not terminated by .', t)
            out.append(('command', toks[i:j]))
            i = j + 1
        else:
            raise _err('unexpected token %s' % t.text, t)
    return out


def parse_modules(text):
    return [x for k, x in split_top(text) if k == 'module']


# --- terms ----------------------------------------------------------------

class TermParser:
    """Mixfix parser over the operators of one flattened module."""

    def __init__(self, module):
        self.module = module
        sig = module.sig
        self.sig = sig
        self.nud = {}
        self.led = {}
        self.juxt_prec = None
        self.funcs = set()
        self.consts = set()
        for name, syms in sig.ops.items():
            for sym in syms:
                if sym.arity == 0:
                    self.consts.add(name)
                    continue
                if sym.prefix_form:
                    self.funcs.add(name)
                    continue
                items = sym.items
                entry = (name, tuple(items), sym.prec)
                if items[0] is None:
                    if len(items) == 2 and items[1] is None:
                        p = sym.prec
                        self.juxt_prec = p if self.juxt_prec is None else max(self.juxt_prec, p)
                    elif items[1] is not None:
                        lst = self.led.setdefault(items[1], [])
                        if entry not in lst:
                            lst.append(entry)
                else:
                    lst = self.nud.setdefault(items[0], [])
                    if entry not in lst:
                        lst.append(entry)
        for lst in itertools.chain(self.nud.values(), self.led.values()):
            lst.sort(key=lambda e: -len(e[1]))

    # phase 1

    def _peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _expect(self, text):
        t = self._peek()
        if t is None or t.text != text:
            raise _err('expected %s' % text, t or self.last)
        self.pos += 1

    def _is_inline_var(self, text):
        k = text.rfind(':')
        if k <= 0 or k == len(text) - 1:
            return None
        name, sort = text[:k], text[k + 1:]
        try:
            return name, self.sig.sort(sort)
        except SortError:
            return None

    def _can_start(self, t, stops):
        x = t.text
        if x in stops:
            return False
        if x in self.led and x not in self.nud:
            return False
        return (x == '(' or is_number(x) or is_qid(x) or x in self.nud or x in self.funcs
                or x in self.vars or x in self.consts or self._is_inline_var(x) is not None)

    def _expr(self, bound, stops):
        left, lprec = self._nud(bound, stops)
        while True:
            t = self._peek()
            if t is None or t.text in stops:
                break
            done = False
            for name, items, prec in self.led.get(t.text, ()):
                if prec <= bound and lprec <= prec:
                    save = self.pos
                    try:
                        self.pos += 1
                        kids = self._rest(items, 2, prec, stops, False)
                        left = ('op', name, [left] + kids, t)
                        lprec = prec
                        done = True
                        break
                    except ParseError:
                        self.pos = save
            if done:
                continue
            p = self.juxt_prec
            if p is not None and p <= bound and lprec <= p and self._can_start(t, stops):
                right, _ = self._expr(p - 1, stops)
                left = ('op', '__', [left, right], t)
                lprec = p
                continue
            break
        return left, lprec

    def _rest(self, items, start, prec, stops, prefix):
        kids = []
        n = len(items)
        for k in range(start, n):
            it = items[k]
            if it is not None:
                self._expect(it)
            elif k + 1 < n:
                nxt = items[k + 1]
                kids.append(self._expr(MAX_PREC, {nxt})[0])
            else:
                kids.append(self._expr(prec if prefix else prec - 1, stops)[0])
        return kids

    def _nud(self, bound, stops):
        t = self._peek()
        if t is None:
            raise _err('unexpected end of term', self.last)
        if t.text in stops:
            raise _err('unexpected %s' % t.text, t)
        x = t.text
        self.pos += 1
        if x == '(':
            e, _ = self._expr(MAX_PREC, {')'})
            self._expect(')')
            return e, 0
        if is_number(x):
            return ('num', int(x), t), 0
        if is_qid(x):
            return ('qid', x, t), 0
        iv = self._is_inline_var(x)
        if iv is not None:
            return ('ivar', iv[0], iv[1], t), 0
        for name, items, prec in self.nud.get(x, ()):
            if items[-1] is None and prec > bound:
                continue
            save = self.pos
            try:
                kids = self._rest(items, 1, prec, stops, True)
                return ('op', name, kids, t), (prec if items[-1] is None else 0)
            except ParseError:
                self.pos = save
        if x in self.funcs:
            nt = self._peek()
            if nt is not None and nt.text == '(':
                self.pos += 1
                args = []
                while True:
                    args.append(self._expr(MAX_PREC, {',', ')'})[0])
                    nt = self._peek()
                    if nt is not None and nt.text == ',':
                        self.pos += 1
                        continue
                    self._expect(')')
                    break
                return ('op', x, args, t), 0
        if x in self.vars or x in self.consts:
            return ('id', x, t), 0
        raise _err('unexpected token %s' % x, t)

    # phase 2

    def _interps(self, node):
        kind = node[0]
        sig = self.sig
        if kind == 'num':
            try:
                return [sig.literal(node[1])]
            except SortError as e:
                raise _err(str(e), node[2]) from None
        if kind == 'qid':
            try:
                return [sig.literal(node[1])]
            except SortError as e:
                raise _err(str(e), node[2]) from None
        if kind == 'ivar':
            return [sig.var(node[1], node[2])]
        if kind == 'id':
            out = []
            v = self.vars.get(node[1])
            if v is not None:
                out.append(v)
            for sym in sig.lookup(node[1], 0):
                out.append(sig.const(sym))
            if not out:
                raise _err('unknown identifier %s' % node[1], node[2])
            return out
        _, name, kids, tok = node
        syms = sig.lookup(name, len(kids))
        if not syms:
            raise _err('no operator %s with %d arguments' % (name, len(kids)), tok)
        kid_ints = [self._interps(k) for k in kids]
        out = []
        seen = set()
        for sym in syms:
            choices = []
            for ints, ak in zip(kid_ints, sym.arg_kinds):
                ok = [x for x in ints if ak is ANY or x.sort.kind is ak]
                if not ok:
                    break
                choices.append(ok)
            else:
                for combo in itertools.product(*choices):
                    if sym.arg_kinds and ANY in sym.arg_kinds and sym.special is not None:
                        ks = [a.sort.kind for a, ak in zip(combo, sym.arg_kinds) if ak is ANY]
                        if any(k is not ks[0] for k in ks):
                            continue
                    t = sig.make(sym, list(combo))
                    if t not in seen:
                        seen.add(t)
                        out.append(t)
        if not out:
            raise _err('no well-kinded reading of %s' % name, tok)
        return out

    def interps(self, toks, vars):
        if not toks:
            raise ParseError('empty term')
        self.toks = toks
        self.pos = 0
        self.last = toks[-1]
        self.vars = vars
        tree, _ = self._expr(MAX_PREC, set())
        if self.pos != len(toks):
            t = toks[self.pos]
            raise _err('unexpected token %s' % t.text, t)
        return self._interps(tree)

    def parse(self, toks, vars, kind=None):
        ints = self.interps(toks, vars)
        if kind is not None and kind is not ANY:
            ints = [t for t in ints if t.sort.kind is kind or t.sort is ANY]
            if not ints:
                raise _err('term has the wrong kind (expected %s)' % kind.name, toks[0])
        if len(ints) > 1:
            from .terms import term_str
            alts = ' | '.join('%s : %s' % (term_str(t), t.sort.name) for t in ints[:4])
            raise _err('ambiguous term: %s' % alts, toks[0])
        return ints[0]


# --- conditions and strategies ---------------------------------------------

def top_level_positions(toks, words):
    """Indices of tokens in `words` outside any bracket pair."""
    out = []
    depth = 0
    for k, t in enumerate(toks):
        x = t.text
        if x in '([{' and len(x) == 1:
            depth += 1
        elif x in ')]}' and len(x) == 1:
            if depth == 0:
                # closes an enclosing bracket: nothing beyond belongs here
                if x in words:
                    out.append(k)
                break
            depth -= 1
        elif depth == 0 and x in words:
            out.append(k)
    return out


def parse_condition(tp, toks, vars):
    """Fragments of a condition.  Matching fragments may bind new variables,
    so the caller's var table is used as is (inline variables need no entry)."""
    frags = []
    cuts = top_level_positions(toks, {'/\\'})
    bounds = [-1] + cuts + [len(toks)]
    for a, b in zip(bounds, bounds[1:]):
        frag = toks[a + 1:b]
        if not frag:
            raise _err('empty condition fragment', toks[a] if a >= 0 else None)
        frags.append(_fragment(tp, frag, vars))
    return frags


def _fragment(tp, frag, vars):
    sig = tp.sig
    for word, kind in ((':=', 'match'), ('=>', 'rw'), ('=', 'eq')):
        pos = top_level_positions(frag, {word})
        if pos:
            k = pos[0]
            lhs, rhs = frag[:k], frag[k + 1:]
            if not lhs or not rhs:
                raise _err('malformed %s condition' % word, frag[k])
            l_ints = tp.interps(lhs, vars)
            r_ints = tp.interps(rhs, vars)
            pairs = [(l, r) for l in l_ints for r in r_ints if l.sort.kind is r.sort.kind]
            if not pairs:
                raise _err('sides of condition have different kinds', frag[k])
            if len(pairs) > 1:
                raise _err('ambiguous condition fragment', frag[k])
            return (kind, pairs[0][0], pairs[0][1])
    pos = top_level_positions(frag, {':'})
    if pos and pos[-1] == len(frag) - 2:
        k = pos[-1]
        try:
            s = sig.sort(frag[-1].text)
        except SortError as e:
            raise _err(str(e), frag[-1]) from None
        t = tp.parse(frag[:k], vars)
        return ('sort', t, s)
    b = tp.parse(frag, vars, sig.true.sort.kind if sig.true is not None else None)
    return ('bool', b)


STRAT_STOPS = {';', '|', ')', '?', ':', 'or-else', ',', '}', '*', '+', '!', 'by', 's.t.',
               'using', ']'}


class StrategyParser:
    def __init__(self, module, tp, vars):
        self.module = module
        self.tp = tp
        self.vars = vars

    def parse(self, toks):
        if not toks:
            raise ParseError('empty strategy')
        self.toks = toks
        self.pos = 0
        s = self._cond()
        if self.pos != len(toks):
            t = toks[self.pos]
            raise _err('unexpected %s in strategy' % t.text, t)
        return s

    def _peek(self):
        return self.toks[self.pos].text if self.pos < len(self.toks) else None

    def _tok(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else self.toks[-1]

    def _expect(self, text):
        if self._peek() != text:
            raise _err('expected %s' % text, self._tok())
        self.pos += 1

    def _cond(self):
        a = self._orelse()
        if self._peek() == '?':
            self.pos += 1
            b = self._cond()
            self._expect(':')
            c = self._cond()
            return S.Cond(a, b, c)
        return a

    def _orelse(self):
        a = self._alt()
        while self._peek() == 'or-else':
            self.pos += 1
            a = S.OrElse(a, self._alt())
        return a

    def _alt(self):
        parts = [self._seq()]
        while self._peek() == '|':
            self.pos += 1
            parts.append(self._seq())
        return parts[0] if len(parts) == 1 else S.Alt(parts)

    def _seq(self):
        parts = [self._post()]
        while self._peek() == ';':
            self.pos += 1
            parts.append(self._post())
        return parts[0] if len(parts) == 1 else S.Seq(parts)

    def _post(self):
        a = self._primary()
        while True:
            x = self._peek()
            if x == '*':
                a = S.Star(a)
            elif x == '+':
                a = S.Plus(a)
            elif x == '!':
                a = S.Bang(a)
            else:
                return a
            self.pos += 1

    def _term_cut(self, stops, kind=None):
        """Parse a term starting here, trying the longest prefix ending at a stop first."""
        start = self.pos
        cuts = [start + k for k in top_level_positions(self.toks[start:], stops)]
        cuts = [c for c in cuts if c > start] + [len(self.toks)]
        cuts = sorted(set(cuts), reverse=True)
        err = None
        for c in cuts:
            try:
                t = self.tp.parse(self.toks[start:c], self.vars, kind)
            except ParseError as e:
                err = err or e
                continue
            self.pos = c
            return t
        raise err or _err('term expected', self._tok())

    def _cond_cut(self, stops):
        start = self.pos
        cuts = [start + k for k in top_level_positions(self.toks[start:], stops)]
        cuts = sorted(set([c for c in cuts if c > start] + [len(self.toks)]), reverse=True)
        err = None
        for c in cuts:
            try:
                cond = parse_condition(self.tp, self.toks[start:c], self.vars)
            except ParseError as e:
                err = err or e
                continue
            self.pos = c
            return cond
        raise err or _err('condition expected', self._tok())

    def _primary(self):
        x = self._peek()
        tok = self._tok()
        if x is None:
            raise _err('unexpected end of strategy', tok)
        if x == '(':
            self.pos += 1
            s = self._cond()
            self._expect(')')
            return s
        if x == 'idle':
            self.pos += 1
            return S.IDLE
        if x == 'fail':
            self.pos += 1
            return S.FAIL
        if x == 'all':
            self.pos += 1
            return S.RuleApp(None)
        if x == 'top':
            self.pos += 1
            self._expect('(')
            if self._peek() == 'all':
                self.pos += 1
                r = S.RuleApp(None, top=True)
            else:
                r = self._ruleapp(top=True)
            self._expect(')')
            return r
        if x in ('one', 'not', 'try', 'test') and self.pos + 1 < len(self.toks) \
                and self.toks[self.pos + 1].text == '(':
            self.pos += 2
            s = self._cond()
            self._expect(')')
            return {'one': S.One, 'not': S.Not, 'try': S.Try, 'test': S.TestOp}[x](s)
        if x in ('match', 'xmatch', 'amatch'):
            self.pos += 1
            pat = self._term_cut(STRAT_STOPS)
            cond = ()
            if self._peek() == 's.t.':
                self.pos += 1
                cond = self._cond_cut(STRAT_STOPS)
            return S.Test(x, pat, cond)
        if x in ('matchrew', 'xmatchrew', 'amatchrew'):
            self.pos += 1
            pat = self._term_cut({'s.t.', 'by'})
            cond = ()
            if self._peek() == 's.t.':
                self.pos += 1
                cond = self._cond_cut({'by'})
            self._expect('by')
            pairs = []
            pvars = pat.variables()
            bound_names = set()
            while True:
                vt = self._tok()
                v = self._term_cut({'using'})
                if not v.is_var or v not in pvars:
                    raise _err('matchrew target must be a variable of the pattern', vt)
                if v.name in bound_names:
                    raise _err('matchrew variable %s used twice' % v.name, vt)
                bound_names.add(v.name)
                self._expect('using')
                pairs.append((v, self._cond()))
                if self._peek() == ',':
                    self.pos += 1
                    continue
                break
            return S.MatchRew(x[:-3] if x != 'matchrew' else 'match', pat, cond, pairs)
        if x in STRAT_STOPS or x in ('?', '[', '{'):
            raise _err('unexpected %s in strategy' % x, tok)
        return self._name()

    def _name(self):
        tok = self._tok()
        x = tok.text
        nxt = self.toks[self.pos + 1].text if self.pos + 1 < len(self.toks) else None
        mod = self.module
        if nxt == '(':
            self.pos += 2
            args = []
            if self._peek() == ')':
                self.pos += 1
            else:
                while True:
                    args.append(self._term_cut({',', ')'}))
                    if self._peek() == ',':
                        self.pos += 1
                        continue
                    self._expect(')')
                    break
            decl = mod.strats.get((x, len(args)))
            if decl is None:
                raise _err('unknown strategy %s/%d' % (x, len(args)), tok)
            args = [self._coerce(a, s, tok) for a, s in zip(args, decl.arg_sorts)]
            return S.Call(x, args)
        if nxt not in ('[', '{') and (x, 0) in mod.strats:
            self.pos += 1
            return S.Call(x)
        return self._ruleapp()

    def _coerce(self, t, sort, tok):
        if sort is not ANY and t.sort.kind is not sort.kind and t.sort is not ANY:
            raise _err('strategy argument %s has the wrong kind' % t, tok)
        return t

    def _ruleapp(self, top=False):
        tok = self._tok()
        label = tok.text
        if label in STRAT_STOPS or label in ('(', '[', '{'):
            raise _err('rule label expected', tok)
        self.pos += 1
        subst = []
        strats = []
        if self._peek() == '[':
            self.pos += 1
            while True:
                vt = self._tok()
                name = vt.text
                self.pos += 1
                self._expect('<-')
                subst.append((name, self._term_cut({',', ']'})))
                if self._peek() == ',':
                    self.pos += 1
                    continue
                self._expect(']')
                break
            names = [n for n, _ in subst]
            if len(set(names)) != len(names):
                raise _err('variable bound twice in rule substitution', tok)
        if self._peek() == '{':
            self.pos += 1
            while True:
                strats.append(self._cond())
                if self._peek() == ',':
                    self.pos += 1
                    continue
                self._expect('}')
                break
        return S.RuleApp(label, subst, strats, top)


def tokens_of(text):
    return tokenize(text)


__all__ = ['ModuleSource', 'Statement', 'OpDecl', 'TermParser', 'StrategyParser', 'parse_condition',
           'split_top', 'parse_modules', 'top_level_positions', 'Token', 'ParseError', 'tokens_of']
