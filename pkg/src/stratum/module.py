"""Flattened modules: signature, equations, rules and strategies.

Statements are kept as tokens in their source module and reparsed in every
importing module, so each flattened module owns its terms.
"""

from .builtins import IMPLICIT, LAZY, PRELUDE, if_sort
from .lexer import ParseError
from .parser import (StrategyParser, TermParser, parse_condition, parse_modules,
                     top_level_positions, _err)
from .strategy import StratDecl, StratDef, walk, RuleApp, Call
from .terms import ANY, Signature, SortError


class Equation:
    __slots__ = ('lhs', 'rhs', 'cond', 'owise', 'nonexec', 'line')

    def __init__(self, lhs, rhs, cond, owise=False, nonexec=False, line=None):
        self.lhs = lhs
        self.rhs = rhs
        self.cond = tuple(cond)
        self.owise = owise
        self.nonexec = nonexec
        self.line = line


class Rule:
    __slots__ = ('label', 'lhs', 'rhs', 'cond', 'nonexec', 'line', 'n_rw', 'index')

    def __init__(self, label, lhs, rhs, cond, nonexec=False, line=None):
        self.label = label
        self.lhs = lhs
        self.rhs = rhs
        self.cond = tuple(cond)
        self.nonexec = nonexec
        self.line = line
        self.n_rw = sum(1 for f in cond if f[0] == 'rw')
        self.index = 0

    def __repr__(self):
        return 'rl [%s] %s => %s' % (self.label, self.lhs, self.rhs)


class Module:
    def __init__(self, name, kind, sig):
        self.name = name
        self.kind = kind
        self.sig = sig
        self.vars = {}
        self.eqs = {}
        self.rules = []
        self.rules_by_label = {}
        self.strats = {}
        self.warnings = []
        self.parser = None
        self._engine = None

    def __repr__(self):
        return '<module %s>' % self.name

    @property
    def engine(self):
        if self._engine is None:
            from .equational import Engine
            self._engine = Engine(self)
        return self._engine

    @property
    def equations(self):
        return [e for lst in self.eqs.values() for e in lst]

    # parsing helpers for callers

    def parse_term(self, text_or_toks, kind=None, vars=None):
        toks = _toks(text_or_toks)
        return self.parser.parse(toks, self.vars if vars is None else vars, kind)

    def parse_strategy(self, text_or_toks, vars=None):
        toks = _toks(text_or_toks)
        sp = StrategyParser(self, self.parser, self.vars if vars is None else vars)
        s = sp.parse(toks)
        self.check_strategy(s)
        return s

    def parse_condition(self, text_or_toks, vars=None):
        return parse_condition(self.parser, _toks(text_or_toks), self.vars if vars is None else vars)

    def check_strategy(self, s):
        """Warnings for rule labels that select no rule."""
        out = []
        for node in walk(s):
            if isinstance(node, RuleApp) and node.label is not None \
                    and node.label not in self.rules_by_label:
                out.append('no rule labelled %s' % node.label)
        return out


def _toks(x):
    from .lexer import tokenize
    return tokenize(x) if isinstance(x, str) else list(x)


class Registry:
    """Module sources by name and their lazily built flattened modules."""

    def __init__(self, prelude=True):
        self.sources = {}
        self.cache = {}
        if prelude:
            for src in parse_modules(PRELUDE):
                self.sources[src.name] = src

    def add(self, src):
        self.sources[src.name] = src
        self.cache.clear()

    def names(self):
        return list(self.sources)

    def get(self, name):
        m = self.cache.get(name)
        if m is None:
            if name not in self.sources:
                raise KeyError('no module %s' % name)
            m = build(self, name)
            self.cache[name] = m
        return m

    def load_text(self, text):
        srcs = parse_modules(text)
        for s in srcs:
            self.add(s)
        return srcs


def _import_order(reg, name):
    order = []
    state = {}

    def visit(n, tok):
        st = state.get(n)
        if st == 'done':
            return
        if st == 'active':
            raise _err('cyclic import of %s' % n, tok)
        src = reg.sources.get(n)
        if src is None:
            raise _err('unknown module %s' % n, tok)
        state[n] = 'active'
        if n not in ('TRUTH-VALUE',) + IMPLICIT:
            for imp in IMPLICIT:
                visit(imp, tok)
        for _, m, t in src.imports:
            visit(m, t)
        state[n] = 'done'
        order.append(src)

    visit(name, reg.sources[name].tok if name in reg.sources else None)
    return order


def _resolve_sort(sig, name, tok):
    if name == 'Universal':
        return ANY
    try:
        return sig.sort(name)
    except SortError as e:
        raise _err(str(e), tok) from None


def build(reg, name):
    order = _import_order(reg, name)
    top = order[-1]
    sig = Signature()
    for src in order:
        for n, _ in src.sorts:
            sig.add_sort(n)
    for src in order:
        for chain, tok in src.subsorts:
            for lows, highs in zip(chain, chain[1:]):
                for lo in lows:
                    for hi in highs:
                        try:
                            sig.add_subsort(lo, hi)
                        except SortError as e:
                            raise _err(str(e), tok) from None
    try:
        sig.finalize_sorts()
    except SortError as e:
        raise _err(str(e), top.tok) from None
    ident = []
    for src in order:
        for od in src.ops:
            args = [_resolve_sort(sig, a, od.tok) for a in od.args]
            res = _resolve_sort(sig, od.result, od.tok)
            attrs = dict(od.attrs)
            try:
                sym = sig.declare(od.name, args, res, attrs)
            except SortError as e:
                raise _err(str(e), od.tok) from None
            if (sym.assoc or sym.comm) and any(k is not sym.result_kind for k in sym.arg_kinds):
                raise _err('assoc/comm operator %s needs argument kinds equal to its result kind'
                           % od.name, od.tok)
            if attrs.get('special'):
                sym.special = od.name
                sym.lazy = od.name in LAZY
                if od.name == 'if_then_else_fi':
                    sym.sort_fn = if_sort
            if 'id' in attrs:
                ident.append((sym, od.tok))
    # precedence must agree between same-named operators
    for opname, syms in sig.ops.items():
        precs = {s.prec for s in syms if s.arity > 0}
        if len(precs) > 1:
            top_prec = max(precs)
            for s in syms:
                s.prec = top_prec
    for sym, tok in ident:
        cands = [s for s in sig.lookup(sym.identity_name, 0) if s.result_kind is sym.result_kind]
        if len(cands) != 1:
            raise _err('cannot resolve identity element %s' % sym.identity_name, tok)
        sym.identity = sig.const(cands[0])
    t = sig.lookup('true', 0)
    f = sig.lookup('false', 0)
    if t and f:
        sig.true = sig.const(t[0])
        sig.false = sig.const(f[0])
    mod = Module(top.name, top.kind, sig)
    tp = TermParser(mod)
    mod.parser = tp
    for src in order:
        svars = {}
        for vname, (sname, tok) in src.vars.items():
            svars[vname] = sig.var(vname, _resolve_sort(sig, sname, tok))
        mod.vars.update(svars)
        src_vars = svars
        for sname, args, subject, tok in src.strats:
            key = (sname, len(args))
            arg_sorts = [_resolve_sort(sig, a, tok) for a in args]
            if key in mod.strats:
                if mod.strats[key].arg_sorts != tuple(arg_sorts):
                    raise _err('strategy %s redeclared with a different signature' % sname, tok)
                continue
            decl = StratDecl(sname, arg_sorts, _resolve_sort(sig, subject, tok))
            decl.tuple_sym = sig.declare('$%s/%d' % (sname, len(args)), arg_sorts, ANY)
            mod.strats[key] = decl
        src._vars_resolved = src_vars
    for src in order:
        for st in src.stmts:
            if st.kind in ('eq', 'ceq'):
                _add_equation(mod, tp, st, src._vars_resolved)
            elif st.kind in ('rl', 'crl'):
                _add_rule(mod, tp, st, src._vars_resolved)
    # strategy definitions last: their bodies may call any declared strategy
    for src in order:
        for st in src.stmts:
            if st.kind in ('sd', 'csd'):
                _add_strat_def(mod, tp, st, src._vars_resolved)
    for lst in mod.eqs.values():
        lst.sort(key=lambda e: e.owise)
    for i, r in enumerate(mod.rules):
        r.index = i
    return mod


def _cond_split(toks, head):
    """Split statement tokens at the condition keyword 'if'.

    An 'if' opening an if_then_else_fi term has a matching 'fi' after it.
    """
    for k, t in enumerate(toks):
        if t.text == 'if':
            after = toks[k + 1:]
            fis = sum(1 for x in after if x.text == 'fi')
            ifs = sum(1 for x in after if x.text == 'if')
            if fis <= ifs:
                return toks[:k], toks[k + 1:]
    return toks, None


def _check_vars(term_vars, allowed, what, tok):
    extra = [v.name for v in term_vars if v not in allowed]
    if extra:
        raise _err('variable %s in %s does not appear in the left-hand side' % (extra[0], what), tok)


def _cond_bound(cond, known, tok, allow_rw_binding, nonexec):
    """Check variables of condition fragments left to right; return all bound variables."""
    known = set(known)
    for frag in cond:
        k = frag[0]
        if k in ('match', 'rw'):
            if not nonexec:
                _check_vars(frag[2].variables() if k == 'match' else frag[1].variables(),
                            known, 'condition', tok)
            known |= frag[1].variables() if k == 'match' else frag[2].variables()
        else:
            vs = set()
            for t in frag[1:]:
                if hasattr(t, 'variables'):
                    vs |= t.variables()
            if not nonexec:
                _check_vars(vs, known, 'condition', tok)
    return known


def _add_equation(mod, tp, st, vars):
    toks, cond_toks = _cond_split(st.tokens, st.tok)
    if st.kind == 'ceq' and cond_toks is None:
        raise _err('ceq needs a condition', st.tok)
    if st.kind == 'eq' and cond_toks is not None:
        raise _err('conditional equation written with eq', st.tok)
    pos = top_level_positions(toks, {'='})
    if not pos:
        raise _err("expected '=' in equation", st.tok)
    lhs_t, rhs_t = toks[:pos[0]], toks[pos[0] + 1:]
    if not lhs_t or not rhs_t:
        raise _err('malformed equation', st.tok)
    pairs = _parse_sides(tp, lhs_t, rhs_t, vars, st.tok)
    lhs, rhs = pairs
    if lhs.is_var:
        raise _err('equation left-hand side is a variable', st.tok)
    cond = parse_condition(tp, cond_toks, vars) if cond_toks else []
    if any(f[0] == 'rw' for f in cond):
        raise _err('rewriting condition in an equation', st.tok)
    nonexec = st.attrs.get('nonexec', False)
    bound = _cond_bound(cond, lhs.variables(), st.tok, False, nonexec)
    if not nonexec:
        _check_vars(rhs.variables(), bound, 'right-hand side', st.tok)
    eq = Equation(lhs, rhs, cond, st.attrs.get('owise', False), nonexec, st.tok.line)
    if not nonexec:
        mod.eqs.setdefault(lhs.sym, []).append(eq)


def _parse_sides(tp, lhs_t, rhs_t, vars, tok):
    l_ints = tp.interps(lhs_t, vars)
    r_ints = tp.interps(rhs_t, vars)
    pairs = [(l, r) for l in l_ints for r in r_ints
             if l.sort.kind is r.sort.kind or r.sort is ANY or l.sort is ANY]
    if not pairs:
        raise _err('the two sides have different kinds', tok)
    if len(pairs) > 1:
        raise _err('ambiguous statement', tok)
    return pairs[0]


def _add_rule(mod, tp, st, vars):
    toks = st.tokens
    label = st.attrs.get('label')
    if len(toks) >= 4 and toks[0].text == '[' and toks[2].text == ']' and toks[3].text == ':':
        label = toks[1].text
        toks = toks[4:]
    toks, cond_toks = _cond_split(toks, st.tok)
    if st.kind == 'crl' and cond_toks is None:
        raise _err('crl needs a condition', st.tok)
    if st.kind == 'rl' and cond_toks is not None:
        raise _err('conditional rule written with rl', st.tok)
    pos = top_level_positions(toks, {'=>'})
    if not pos:
        raise _err("expected '=>' in rule", st.tok)
    lhs, rhs = _parse_sides(tp, toks[:pos[0]], toks[pos[0] + 1:], vars, st.tok)
    cond = parse_condition(tp, cond_toks, vars) if cond_toks else []
    nonexec = st.attrs.get('nonexec', False)
    bound = _cond_bound(cond, lhs.variables(), st.tok, True, nonexec)
    if not nonexec:
        _check_vars(rhs.variables(), bound, 'right-hand side', st.tok)
    r = Rule(label, lhs, rhs, cond, nonexec, st.tok.line)
    mod.rules.append(r)
    if label is not None:
        mod.rules_by_label.setdefault(label, []).append(r)


def _add_strat_def(mod, tp, st, vars):
    toks, cond_toks = _cond_split(st.tokens, st.tok)
    if st.kind == 'csd' and cond_toks is None:
        raise _err('csd needs a condition', st.tok)
    if st.kind == 'sd' and cond_toks is not None:
        raise _err('conditional definition written with sd', st.tok)
    pos = top_level_positions(toks, {':='})
    if not pos:
        raise _err("expected ':=' in strategy definition", st.tok)
    head, body = toks[:pos[0]], toks[pos[0] + 1:]
    if not head:
        raise _err('strategy name expected', st.tok)
    name = head[0].text
    args = []
    if len(head) > 1:
        if head[1].text != '(' or head[-1].text != ')':
            raise _err('malformed strategy definition head', head[1])
        inner = head[2:-1]
        if inner:
            cuts = top_level_positions(inner, {','})
            bounds = [-1] + cuts + [len(inner)]
            args = [inner[a + 1:b] for a, b in zip(bounds, bounds[1:])]
    decl = mod.strats.get((name, len(args)))
    if decl is None:
        raise _err('strategy %s/%d is not declared' % (name, len(args)), head[0])
    terms = []
    for a, s in zip(args, decl.arg_sorts):
        if not a:
            raise _err('empty strategy argument', head[0])
        terms.append(tp.parse(a, vars, None if s is ANY else s.kind))
    lhs = mod.sig.make(decl.tuple_sym, terms)
    cond = parse_condition(tp, cond_toks, vars) if cond_toks else []
    if any(f[0] == 'rw' for f in cond):
        raise _err('rewriting condition in a strategy definition', st.tok)
    sp = StrategyParser(mod, tp, vars)
    try:
        s = sp.parse(body)
    except ParseError:
        raise
    decl.defs.append(StratDef(decl, lhs, cond, s, st.tok.line))
