"""Order-sorted signatures and hash-consed terms.

Terms are interned per signature, so two canonical terms are equal modulo
the structural axioms exactly when they are the same object.  Canonical
form flattens associative operators, drops identity elements and sorts the
arguments of commutative operators.
"""

from __future__ import annotations


class _Everything:
    __slots__ = ()

    def __contains__(self, item):
        return True


class Sort:
    __slots__ = ('name', 'supers', 'kind', 'is_kind')

    def __init__(self, name, is_kind=False):
        self.name = name
        self.supers = frozenset((self,))
        self.kind = self
        self.is_kind = is_kind

    def leq(self, other):
        return other in self.supers

    def __repr__(self):
        return self.name


# Sort of the context hole and of polymorphic operator arguments.
ANY = Sort('Universal', is_kind=True)
ANY.supers = _Everything()


class SortError(Exception):
    pass


class Symbol:
    """An operator of a signature.

    Several declarations whose argument and result kinds coincide are
    subsort overloads of the same symbol.
    """

    __slots__ = ('name', 'arity', 'decls', 'result_kind', 'arg_kinds', 'assoc', 'comm',
                 'identity', 'identity_name', 'prec', 'items', 'prefix_form', 'special',
                 'lazy', 'okey', 'value', 'ctor', 'frozen', 'sort_fn', '_sort_cache',
                 'multi_cache', 'sig')

    def __init__(self, sig, name, arity):
        self.sig = sig
        self.name = name
        self.arity = arity
        self.decls = []
        self.result_kind = None
        self.arg_kinds = ()
        self.assoc = self.comm = False
        self.identity = None
        self.identity_name = None
        self.prec = 0
        self.items = None
        self.prefix_form = False
        self.special = None
        self.lazy = False
        self.okey = (2, 0, '%s/%d' % (name, arity))
        self.value = None
        self.ctor = False
        self.frozen = False
        self.sort_fn = None
        self._sort_cache = {}
        self.multi_cache = {}

    def __repr__(self):
        return self.name

    def least_sort(self, args):
        if self.sort_fn is not None:
            return self.sort_fn(args)
        if self.assoc and len(args) > 2:
            s = self._bin_sort(args[0].sort, args[1].sort)
            for a in args[2:]:
                s = self._bin_sort(s, a.sort)
            return s
        key = tuple(a.sort for a in args)
        s = self._sort_cache.get(key)
        if s is None:
            s = self._compute(key)
            self._sort_cache[key] = s
        return s

    def _bin_sort(self, s1, s2):
        key = (s1, s2)
        s = self._sort_cache.get(key)
        if s is None:
            s = self._compute(key)
            self._sort_cache[key] = s
        return s

    def _compute(self, sorts):
        best = None
        for arg_sorts, res in self.decls:
            for have, want in zip(sorts, arg_sorts):
                if want is not ANY and want not in have.supers:
                    break
            else:
                if best is None or best in res.supers:
                    best = res
        return best if best is not None else self.result_kind

    def can_hold_many(self, sort):
        """Whether a variable of this sort may be bound to an application of this symbol."""
        r = self.multi_cache.get(sort)
        if r is None:
            r = sort.is_kind or any(sort in res.supers for _, res in self.decls)
            self.multi_cache[sort] = r
        return r


class Term:
    __slots__ = ('sym', 'args', 'sort', 'hash', 'ground', '_key', 'name', 'size')
    is_var = False

    def __hash__(self):
        return self.hash

    def __repr__(self):
        return term_str(self)

    def key(self):
        k = self._key
        if k is None:
            k = (1, self.sym.okey, tuple(a.key() for a in self.args))
            self._key = k
        return k

    def variables(self):
        out = set()
        _collect_vars(self, out)
        return out


class Var(Term):
    __slots__ = ()
    is_var = True

    def key(self):
        k = self._key
        if k is None:
            k = (0, (0, 0, self.name), (self.sort.name,))
            self._key = k
        return k


def _collect_vars(t, out):
    if t.is_var:
        out.add(t)
    elif not t.ground:
        for a in t.args:
            _collect_vars(a, out)


def key_of(t):
    return t.key()


class Signature:
    def __init__(self):
        self.sorts = {}
        self._above = {}
        self.kinds = []
        self.ops = {}
        self._table = {}
        self._literals = {}
        self.hole = None
        self.true = self.false = None

    # sorts

    def add_sort(self, name):
        if name not in self.sorts:
            self.sorts[name] = Sort(name)
            self._above[name] = set()
        return self.sorts[name]

    def add_subsort(self, lo, hi):
        for n in (lo, hi):
            if n not in self.sorts:
                raise SortError('unknown sort %s' % n)
        self._above[lo].add(hi)

    def finalize_sorts(self):
        closure = {}

        def ups(n, trail):
            if n in closure:
                return closure[n]
            if n in trail:
                raise SortError('cycle in subsort relation through %s' % n)
            trail.add(n)
            acc = {n}
            for m in self._above[n]:
                acc |= ups(m, trail)
            trail.discard(n)
            closure[n] = acc
            return acc

        for n in self.sorts:
            ups(n, set())
        # connected components of the subsort graph
        parent = {n: n for n in self.sorts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for n, hs in self._above.items():
            for h in hs:
                parent[find(n)] = find(h)
        comps = {}
        for n in self.sorts:
            comps.setdefault(find(n), []).append(n)
        self.kinds = []
        for members in comps.values():
            tops = sorted(m for m in members if not self._above[m])
            kind = Sort('[%s]' % ','.join(tops), is_kind=True)
            self.kinds.append(kind)
            for m in members:
                s = self.sorts[m]
                s.kind = kind
                s.supers = frozenset([self.sorts[u] for u in closure[m]] + [kind])
        self.hole = self.var('⊖', ANY)

    def sort(self, name):
        if name.startswith('[') and name.endswith(']'):
            inner = name[1:-1].split(',')[0]
            return self.sort(inner).kind
        try:
            return self.sorts[name]
        except KeyError:
            raise SortError('unknown sort %s' % name) from None

    # operators

    def declare(self, name, arg_sorts, result, attrs=None):
        attrs = attrs or {}
        arity = len(arg_sorts)
        rk = ANY if result is ANY else result.kind
        aks = tuple(ANY if s is ANY else s.kind for s in arg_sorts)
        cands = self.ops.setdefault(name, [])
        for sym in cands:
            if sym.arity == arity and sym.result_kind is rk and sym.arg_kinds == aks:
                break
        else:
            sym = Symbol(self, name, arity)
            sym.result_kind = rk
            sym.arg_kinds = aks
            sym.items = split_name(name, arity)
            sym.prefix_form = '_' not in name and arity > 0
            sym.prec = attrs.get('prec', default_prec(sym.items))
            cands.append(sym)
        sym.decls.append((tuple(arg_sorts), result))
        sym._sort_cache.clear()
        sym.multi_cache.clear()
        if attrs.get('assoc'):
            sym.assoc = True
        if attrs.get('comm'):
            sym.comm = True
        if attrs.get('ctor'):
            sym.ctor = True
        if 'id' in attrs:
            sym.identity_name = attrs['id']
        if 'prec' in attrs:
            sym.prec = attrs['prec']
        if (sym.assoc or sym.comm) and arity != 2:
            raise SortError('assoc/comm operator %s must be binary' % name)
        return sym

    def lookup(self, name, arity):
        return [s for s in self.ops.get(name, ()) if s.arity == arity]

    # construction

    def var(self, name, sort):
        k = ('$var', name, sort)
        t = self._table.get(k)
        if t is None:
            t = Var()
            t.sym = None
            t.args = ()
            t.name = name
            t.sort = sort
            t.hash = hash(k)
            t.ground = False
            t._key = None
            t.size = 1
            self._table[k] = t
        return t

    def literal(self, value):
        """Interned constant for an integer or a quoted identifier (given as str)."""
        t = self._literals.get(value)
        if t is not None:
            return t
        if isinstance(value, str):
            sym = Symbol(self, value, 0)
            sym.okey = (1, 0, value)
            sym.value = value
            sort = self.sorts.get('Qid')
            if sort is None:
                raise SortError('quoted identifiers need the QID module')
        else:
            sym = Symbol(self, str(value), 0)
            sym.okey = (0, value, '')
            sym.value = value
            name = 'Zero' if value == 0 else 'NzNat' if value > 0 else 'NzInt'
            sort = self.sorts.get(name)
            if sort is None:
                raise SortError('numeric literal %s needs sort %s' % (value, name))
        sym.items = [sym.name]
        sym.result_kind = sort.kind
        sym.decls.append(((), sort))
        t = self._intern(sym, (), sort)
        self._literals[value] = t
        return t

    def _intern(self, sym, args, sort=None):
        k = (sym, args)
        t = self._table.get(k)
        if t is None:
            t = Term()
            t.sym = sym
            t.args = args
            t.sort = sort if sort is not None else sym.least_sort(args)
            t.hash = hash(k)
            g = True
            n = 1
            for a in args:
                if not a.ground:
                    g = False
                n += a.size
            t.ground = g
            t.size = n
            t._key = None
            self._table[k] = t
        return t

    def make(self, sym, args):
        """Canonical application of sym to canonical arguments."""
        if sym.assoc:
            flat = []
            for a in args:
                if a.sym is sym:
                    flat.extend(a.args)
                else:
                    flat.append(a)
            args = flat
        if sym.identity is not None:
            e = sym.identity
            if e in args:
                args = [a for a in args if a is not e]
                if not args:
                    return e
                if len(args) == 1:
                    return args[0]
        if sym.comm and len(args) > 1:
            args = sorted(args, key=key_of)
        return self._intern(sym, tuple(args))

    def const(self, sym):
        return self._intern(sym, ())


def split_name(name, arity):
    """Token pattern of an operator name; None marks an argument hole."""
    if '_' not in name:
        if arity == 0:
            return [name]
        items = [name, '(']
        for i in range(arity):
            if i:
                items.append(',')
            items.append(None)
        items.append(')')
        return items
    items = []
    word = ''
    for ch in name:
        if ch == '_':
            if word:
                items.append(word)
                word = ''
            items.append(None)
        else:
            word += ch
    if word:
        items.append(word)
    return items


def default_prec(items):
    if len(items) > 1 and (items[0] is None or items[-1] is None):
        return 41
    return 0


# substitutions

def apply_subst(sig, t, sub):
    """Instantiate t with sub and canonicalize."""
    if t.ground or not sub:
        return t
    if t.is_var:
        return sub.get(t, t)
    return _inst(sig, t, sub, {})


def _inst(sig, t, sub, memo):
    if t.ground:
        return t
    if t.is_var:
        return sub.get(t, t)
    r = memo.get(t)
    if r is None:
        args = [_inst(sig, a, sub, memo) for a in t.args]
        r = sig.make(t.sym, args)
        memo[t] = r
    return r


def compose(sig, s2, s1):
    """The substitution s2 o s1."""
    out = {x: apply_subst(sig, v, s2) for x, v in s1.items()}
    for x, v in s2.items():
        if x not in out:
            out[x] = v
    return out


def plug(sig, ctx, t):
    """Fill the hole of a context term."""
    return apply_subst(sig, ctx, {sig.hole: t})


def least_sort(t):
    return t.sort


def equal_mod_b(t1, t2):
    return t1 is t2


# printing

def _prec_of(t):
    if t.is_var or t.sym.value is not None:
        return 0
    items = t.sym.items
    if len(items) > 1 and (items[0] is None or items[-1] is None):
        return t.sym.prec
    return 0


def term_str(t, show_var_sorts=False):
    if t.is_var:
        if show_var_sorts and t.sort is not ANY:
            return '%s:%s' % (t.name, t.sort.name)
        return t.name
    sym = t.sym
    if sym.value is not None:
        return str(sym.value) if not isinstance(sym.value, str) else sym.value
    if not t.args:
        return sym.name
    if sym.prefix_form:
        return '%s(%s)' % (sym.name, ', '.join(term_str(a, show_var_sorts) for a in t.args))
    items = sym.items
    if sym.assoc and len(t.args) > 2:
        # print flattened chains with the operator's separator
        sep = [it for it in items[1:-1]]
        parts = []
        for i, a in enumerate(t.args):
            parts.append(_arg_str(a, sym.prec, i > 0, show_var_sorts))
        if sep:
            return (' %s ' % ' '.join(sep)).join(parts) if sep != [','] else ', '.join(parts)
        return ' '.join(parts)
    out = []
    ai = 0
    n = len(items)
    for idx, it in enumerate(items):
        if it is None:
            a = t.args[ai]
            ai += 1
            if idx == 0 or idx == n - 1:
                # a prefix operator's trailing argument may have equal precedence
                right = idx > 0 and items[0] is None
                out.append(_arg_str(a, sym.prec, right, show_var_sorts))
            else:
                s = term_str(a, show_var_sorts)
                nxt = items[idx + 1]
                if not a.is_var and a.sym.items and nxt in a.sym.items and len(a.sym.items) > 1 and a.args:
                    s = '(%s)' % s
                out.append(s)
        else:
            out.append(it)
    return _join(out)


def _arg_str(a, prec, right, show):
    s = term_str(a, show)
    p = _prec_of(a)
    if p > prec or (right and p == prec and p > 0):
        return '(%s)' % s
    return s


def _join(parts):
    out = ''
    for p in parts:
        if not out:
            out = p
        elif p in (',', ')', ']', '}') or out[-1] in '([{':
            out += p
        else:
            out += ' ' + p
    return out
