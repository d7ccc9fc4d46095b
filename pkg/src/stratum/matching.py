"""Matching modulo associativity, commutativity and identity.

All matchers are generators of substitutions (plain dicts, never mutated
after being yielded).  Positions inside a subject are described by context
chains: ``(parent, sym, left, right)`` means the focused term sits between
the argument tuples ``left`` and ``right`` of an application of ``sym``.
``None`` is the empty context.
"""

from collections import Counter

from .terms import ANY, apply_subst


def sort_ok(var, t):
    s = var.sort
    return s is ANY or s in t.sort.supers


def bind(var, t, sub):
    b = sub.get(var)
    if b is None:
        if sort_ok(var, t):
            d = dict(sub)
            d[var] = t
            return d
        return None
    return sub if b is t else None


def arg_list(sym, t):
    """Flattened argument list of t viewed as an application of an assoc sym."""
    if t.sym is sym and not t.is_var:
        return t.args
    if sym.identity is not None and t is sym.identity:
        return ()
    return (t,)


def _special_literal(p, s):
    """Integer literal subject against an s_ / -_ pattern: the implied argument."""
    v = s.sym.value if not s.is_var else None
    if not isinstance(v, int) or v is True or v is False:
        return None
    name = p.sym.name
    if name == 's_' and v >= 1:
        return v - 1
    if name == '-_' and v < 0:
        return -v
    return None


def match(sig, p, s, sub):
    """All extensions of sub matching pattern p against subject s at the top."""
    if p.ground:
        if p is s:
            yield sub
        return
    if p.is_var:
        r = bind(p, s, sub)
        if r is not None:
            yield r
        return
    sym = p.sym
    if s.sym is not sym or s.is_var:
        if sym.special is not None and sym.arity == 1:
            k = _special_literal(p, s)
            if k is not None:
                yield from match(sig, p.args[0], sig.literal(k), sub)
            return
        if sym.identity is None:
            return
    if sym.assoc:
        if sym.comm:
            yield from _match_ac(sig, sym, p.args, Counter(arg_list(sym, s)), sub, False)
        else:
            yield from _match_assoc(sig, sym, p.args, 0, arg_list(sym, s), 0, sub, False)
        return
    if s.sym is sym and not s.is_var:
        sargs_options = [s.args]
    elif sym.identity is not None:
        e = sym.identity
        sargs_options = [(s, e), (e, s)] if s is not e else [(e, e)]
    else:
        return
    if sym.comm:
        seen = []
        for sargs in sargs_options:
            for order in (sargs, (sargs[1], sargs[0])):
                if order in seen:
                    continue
                seen.append(order)
                yield from _match_args(sig, p.args, order, sub)
    else:
        for sargs in sargs_options:
            yield from _match_args(sig, p.args, sargs, sub)


def _arg_order(pargs):
    # ground and structured arguments first: they fail fastest
    return sorted(range(len(pargs)), key=lambda i: (0 if pargs[i].ground else 2 if pargs[i].is_var else 1))


def _match_args(sig, pargs, sargs, sub):
    if len(pargs) != len(sargs):
        return
    order = _arg_order(pargs)

    def go(k, sub):
        if k == len(order):
            yield sub
            return
        i = order[k]
        for s2 in match(sig, pargs[i], sargs[i], sub):
            yield from go(k + 1, s2)

    yield from go(0, sub)


def _can_empty(sym, var):
    e = sym.identity
    return e is not None and sort_ok(var, e)


def _may_be(q, e):
    """Whether some instance of q may be the constant e (a static filter)."""
    if q.is_var:
        return sort_ok(q, e)
    if q.ground:
        return q is e
    return q.sym.identity is e and all(_may_be(a, e) for a in q.args)


_VANISH = {}
_SPAN = {}


def _can_vanish(sym, q):
    """Whether argument q of a sym pattern may take an empty slot."""
    r = _VANISH.get((sym, q))
    if r is None:
        e = sym.identity
        r = _VANISH[sym, q] = e is not None and _may_be(q, e)
    return r


def _may_span(sym, q):
    """Whether an instance of argument q may be an application of sym itself,
    i.e. cover several flattened subject arguments."""
    r = _SPAN.get((sym, q))
    if r is None:
        r = _SPAN[sym, q] = _span(sym, q)
    return r


def _span(sym, q):
    if q.is_var:
        return sym.can_hold_many(q.sort)
    if q.ground or q.sym.identity is None:
        return False
    # every other argument collapses away, leaving one that spans
    return any(_may_span(sym, a) and all(_can_vanish(q.sym, b) for j, b in enumerate(q.args) if j != i)
               for i, a in enumerate(q.args))


def _seg_term(sig, sym, seg):
    if not seg:
        return sym.identity
    if len(seg) == 1:
        return seg[0]
    return sig.make(sym, seg)


_ASSOC_INFO = {}


def _assoc_info(sym, pargs):
    """Per-argument (can be empty, can hold many) flags and suffix minimum lengths.

    The minimum lengths count every variable that cannot be empty as one
    element, bound or not, so they are lower bounds usable for pruning.
    """
    key = (sym, pargs)
    r = _ASSOC_INFO.get(key)
    if r is None:
        empty = tuple(_can_vanish(sym, q) for q in pargs)
        many = tuple(_may_span(sym, q) for q in pargs)
        suffix = [0] * (len(pargs) + 1)
        for k in range(len(pargs) - 1, -1, -1):
            suffix[k] = suffix[k + 1] + (0 if empty[k] else 1)
        r = _ASSOC_INFO[key] = (empty, many, tuple(suffix))
    return r


def _match_assoc(sig, sym, pargs, pi, sargs, si, sub, ext, info=None):
    """Match pattern arguments pargs[pi:] against subject segment sargs[si:].

    With ext, the last pattern argument need not reach the end; the generator
    then yields (sub, end) pairs instead of substitutions.
    """
    if info is None:
        info = _assoc_info(sym, pargs)
    out = []
    # results are few and finite, so collect them eagerly: cheaper than nesting generators
    _assoc_collect(sig, sym, pargs, info, pi, sargs, si, sub, ext, out)
    return iter(out)


def _assoc_collect(sig, sym, pargs, info, pi, sargs, si, sub, ext, out):
    n = len(sargs)
    np_ = len(pargs)
    if pi == np_:
        if ext:
            out.append((sub, si))
        elif si == n:
            out.append(sub)
        return
    empty, many_flags, suffix = info
    if n - si < suffix[pi]:
        return
    p = pargs[pi]
    if p.is_var:
        b = sub.get(p)
        if b is not None:
            items = arg_list(sym, b)
            m = len(items)
            if sargs[si:si + m] == tuple(items):
                _assoc_collect(sig, sym, pargs, info, pi + 1, sargs, si + m, sub, ext, out)
            return
        last = pi == np_ - 1
        can_empty = empty[pi]
        hi = n - si - suffix[pi + 1]
        lo = 0 if can_empty else 1
        if not many_flags[pi]:
            hi = min(hi, 1)
        if last and not ext:
            lo = hi = n - si
            if not (lo >= 0 and (lo > 0 or can_empty) and (lo <= 1 or many_flags[pi])):
                return
        nxt = None if last else pargs[pi + 1]
        nxt_ground = nxt is not None and nxt.ground
        for m in range(lo, hi + 1):
            if nxt_ground and (si + m >= n or sargs[si + m] is not nxt):
                # a ground neighbour fixes where this segment may end
                continue
            t = sargs[si] if m == 1 else _seg_term(sig, sym, sargs[si:si + m])
            if not sort_ok(p, t):
                continue
            s2 = dict(sub)
            s2[p] = t
            _assoc_collect(sig, sym, pargs, info, pi + 1, sargs, si + m, s2, ext, out)
        return
    if empty[pi]:
        # a structured argument whose instance collapses to the identity
        for s2 in match(sig, p, sym.identity, sub):
            _assoc_collect(sig, sym, pargs, info, pi + 1, sargs, si, s2, ext, out)
    if si >= n:
        return
    if p.ground:
        if sargs[si] is p:
            _assoc_collect(sig, sym, pargs, info, pi + 1, sargs, si + 1, sub, ext, out)
        return
    for s2 in match(sig, p, sargs[si], sub):
        _assoc_collect(sig, sym, pargs, info, pi + 1, sargs, si + 1, s2, ext, out)
    if many_flags[pi]:
        # a collapsing structured argument may stand for a whole segment
        for m in range(2, n - si - suffix[pi + 1] + 1):
            for s2 in match(sig, p, sig.make(sym, sargs[si:si + m]), sub):
                _assoc_collect(sig, sym, pargs, info, pi + 1, sargs, si + m, s2, ext, out)


def _ac_items(sym, t):
    return Counter(arg_list(sym, t))


def _submultisets(items, size_lo, size_hi):
    """Sub-multisets of a Counter as lists, sizes within bounds, generated lazily."""
    keys = list(items)
    acc = []

    def go(i, size):
        if i == len(keys):
            if size_lo <= size:
                yield list(acc)
            return
        k = keys[i]
        # earlier elements first, so a singleton choice follows subject order
        for c in range(min(items[k], size_hi - size), -1, -1):
            acc.extend([k] * c)
            yield from go(i + 1, size + c)
            if c:
                del acc[-c:]

    return go(0, 0)


def _ac_order(pargs, sub):
    ground = [p for p in pargs if p.ground]
    struct = [p for p in pargs if not p.ground and not p.is_var]
    bound = [p for p in pargs if p.is_var and p in sub]
    free = [p for p in pargs if p.is_var and p not in sub]
    return ground + struct + bound + free


def _match_ac(sig, sym, pargs, items, sub, ext):
    """AC matching of pattern arguments against a multiset of subject arguments.

    With ext, unmatched subject arguments form a remainder; yields
    (sub, remainder Counter) pairs.
    """
    yield from _ac_go(sig, sym, _ac_order(pargs, sub), 0, items, sub, ext)


def _ac_go(sig, sym, pargs, i, items, sub, ext):
    if i == len(pargs):
        if ext:
            yield sub, items
        elif not +items:
            yield sub
        return
    p = pargs[i]
    if p.ground:
        if items[p] > 0:
            rest = items.copy()
            rest[p] -= 1
            yield from _ac_go(sig, sym, pargs, i + 1, rest, sub, ext)
        return
    if not p.is_var:
        if _can_vanish(sym, p):
            for s2 in match(sig, p, sym.identity, sub):
                yield from _ac_go(sig, sym, pargs, i + 1, items, s2, ext)
        for k in [k for k, c in items.items() if c > 0]:
            for s2 in match(sig, p, k, sub):
                rest = items.copy()
                rest[k] -= 1
                yield from _ac_go(sig, sym, pargs, i + 1, rest, s2, ext)
        if _may_span(sym, p):
            # a collapsing structured argument may stand for a sub-multiset
            for chosen in _submultisets(+items, 2, sum(items.values())):
                t = sig.make(sym, chosen)
                for s2 in match(sig, p, t, sub):
                    rest = items.copy()
                    rest.subtract(chosen)
                    yield from _ac_go(sig, sym, pargs, i + 1, rest, s2, ext)
        return
    b = sub.get(p)
    if b is not None:
        need = _ac_items(sym, b)
        rest = items.copy()
        rest.subtract(need)
        if all(c >= 0 for c in rest.values()):
            yield from _ac_go(sig, sym, pargs, i + 1, rest, sub, ext)
        return
    total = sum(items.values())
    # remaining free variables (all later args are free vars by ordering)
    later = pargs[i + 1:]
    later_min = sum(0 if _can_empty(sym, q) else 1 for q in later)
    many = sym.can_hold_many(p.sort)
    lo = 0 if _can_empty(sym, p) else 1
    hi = total - later_min
    if not many:
        hi = min(hi, 1)
    if not later and not ext:
        if total < lo or total > hi:
            return
        lo = total
    if hi < lo:
        return
    if not later and not ext:
        # the last free variable takes everything left
        candidates = [list((+items).elements())]
    else:
        candidates = _submultisets(+items, lo, hi)
    for chosen in candidates:
        t = _seg_term(sig, sym, sorted(chosen, key=lambda x: x.key()))
        s2 = bind(p, t, sub)
        if s2 is None:
            continue
        rest = items.copy()
        rest.subtract(chosen)
        yield from _ac_go(sig, sym, pargs, i + 1, rest, s2, ext)


# extension and positions

def _absorbs(sym, q, sub):
    return q.is_var and q not in sub and sym.can_hold_many(q.sort)


def match_ext(sig, p, s, sub):
    """Top matching with extension: yields (sub, left, right) where left/right
    are the uncovered subject arguments (None, None for a whole match)."""
    if p.is_var or p.ground or not p.sym.assoc or s.is_var or s.sym is not p.sym:
        for r in match(sig, p, s, sub):
            yield r, None, None
        return
    sym = p.sym
    sargs = s.args
    n = len(sargs)
    pargs = p.args
    if sym.comm:
        if any(_absorbs(sym, q, sub) for q in pargs):
            # a free multiset variable already takes any remainder
            for r in match(sig, p, s, sub):
                yield r, None, None
            return
        for r, rest in _match_ac(sig, sym, pargs, Counter(sargs), sub, True):
            rest = +rest
            left = n - sum(rest.values())
            if not rest:
                yield r, None, None
            elif left >= 2:
                yield r, tuple(sorted(rest.elements(), key=lambda x: x.key())), ()
        return
    # a free list variable at an end of the pattern already covers that side
    info = _assoc_info(sym, pargs)
    starts = (0,) if _absorbs(sym, pargs[0], sub) else range(n - info[2][0] + 1)
    closed = _absorbs(sym, pargs[-1], sub)
    for i in starts:
        for r, j in _match_assoc(sig, sym, pargs, 0, sargs, i, sub, True, info):
            if closed and j != n:
                continue
            if i == 0 and j == n:
                yield r, None, None
            elif j - i >= 2:
                yield r, sargs[:i], sargs[j:]


def rebuild(sig, ctx, t):
    """Plug t into a context chain."""
    while ctx is not None:
        parent, sym, left, right = ctx
        t = sig.make(sym, left + (t,) + right)
        ctx = parent
    return t


_COLLAPSIBLE = {}


def _collapsible(p):
    """Whether p may match a term with another top symbol through identity collapse."""
    r = _COLLAPSIBLE.get(p)
    if r is None:
        sym = p.sym
        solid = sum(1 for q in p.args if not _can_vanish(sym, q))
        r = _COLLAPSIBLE[p] = solid <= 1
    return r


def _may_match_at(p, t):
    if p.is_var:
        return True
    sym = p.sym
    if t.sym is sym:
        return True
    if sym.identity is not None:
        return _collapsible(p)
    return sym.special is not None and sym.arity == 1 and t.sym is not None and t.sym.value is not None


_LEAVES = {}
_NEEDS = {}


def _leaves(t):
    """Constants occurring in t."""
    r = _LEAVES.get(t)
    if r is None:
        if t.is_var:
            r = frozenset()
        elif not t.args:
            r = frozenset((t,))
        else:
            r = frozenset().union(*(_leaves(a) for a in t.args))
        _LEAVES[t] = r
    return r


def _needs(p):
    """Constants every instance of p must contain.

    Identity elements and literals are left out: they can vanish or be
    produced by matching modulo axioms and successor arithmetic.
    """
    r = _NEEDS.get(p)
    if r is None:
        ids = set()
        _identities(p, ids)
        r = _NEEDS[p] = frozenset(c for c in _leaves(p)
                                  if c not in ids and c.sym.value is None)
    return r


def _identities(p, out):
    if p.is_var:
        return
    if p.sym.identity is not None:
        out.add(p.sym.identity)
    for a in p.args:
        _identities(a, out)


def match_anywhere_raw(sig, p, s, sub, ctx=None, ext=True):
    """Leftmost-innermost enumeration of (sub, context chain) pairs."""
    need = _needs(p)
    if need and not need <= _leaves(s):
        return
    if not s.is_var and s.args and s.sym.frozen is False:
        sym = s.sym
        args = s.args
        for k, a in enumerate(args):
            if a.args or _may_match_at(p, a):
                yield from match_anywhere_raw(sig, p, a, sub, (ctx, sym, args[:k], args[k + 1:]), ext)
    if not _may_match_at(p, s):
        return
    if ext:
        for r, left, right in match_ext(sig, p, s, sub):
            if left is None:
                yield r, ctx
            else:
                yield r, (ctx, s.sym, left, right)
    else:
        for r in match(sig, p, s, sub):
            yield r, ctx


def match_ext_raw(sig, p, s, sub):
    for r, left, right in match_ext(sig, p, s, sub):
        yield r, (None if left is None else (None, s.sym, left, right))


def context_term(sig, ctx):
    return rebuild(sig, ctx, sig.hole)


def _restrict(sub, pvars):
    return frozenset((v, t) for v, t in sub.items() if v in pvars)


def _dedup(sig, pattern, pairs):
    pvars = pattern.variables()
    seen = set()
    out = []
    for sub, ctx in pairs:
        c = context_term(sig, ctx)
        key = (_restrict(sub, pvars), c)
        if key not in seen:
            seen.add(key)
            out.append(({v: t for v, t in key[0]}, c))
    return out


def match_top(sig, pattern, subject, sub=None):
    """Duplicate-free list of matching substitutions (restricted to pattern variables)."""
    pvars = pattern.variables()
    seen = set()
    out = []
    for r in match(sig, pattern, subject, dict(sub or {})):
        key = _restrict(r, pvars)
        if key not in seen:
            seen.add(key)
            out.append(dict(key))
    return out


def match_extension(sig, pattern, subject, sub=None):
    """List of (substitution, context term) pairs for top matching with extension."""
    return _dedup(sig, pattern, match_ext_raw(sig, pattern, subject, dict(sub or {})))


def match_anywhere(sig, pattern, subject, sub=None):
    """List of (substitution, context term) pairs over all positions."""
    return _dedup(sig, pattern, match_anywhere_raw(sig, pattern, subject, dict(sub or {})))


def check_plug(sig, pattern, sub, ctx_term, subject):
    """The plug-back invariant of a match result."""
    filled = apply_subst(sig, pattern, sub)
    return apply_subst(sig, ctx_term, {sig.hole: filled}) is subject
