"""Prelude modules and the native evaluation of their special operators.

Special operators behave as equations: each successful evaluation counts as
one equational rewrite.
"""

PRELUDE = r"""
fmod TRUTH-VALUE is
  sort Bool .
  op true : -> Bool [ctor] .
  op false : -> Bool [ctor] .
endfm

fmod BOOL is
  protecting TRUTH-VALUE .
  op _and_ : Bool Bool -> Bool [prec 55 special] .
  op _or_ : Bool Bool -> Bool [prec 59 special] .
  op _xor_ : Bool Bool -> Bool [prec 57 special] .
  op not_ : Bool -> Bool [prec 53 special] .
  op _implies_ : Bool Bool -> Bool [prec 61 special] .
  op if_then_else_fi : Bool Universal Universal -> Universal [special] .
  op _==_ : Universal Universal -> Bool [prec 51 special] .
  op _=/=_ : Universal Universal -> Bool [prec 51 special] .
endfm

fmod EXT-BOOL is
  protecting BOOL .
  op _and-then_ : Bool Bool -> Bool [prec 55 special] .
  op _or-else_ : Bool Bool -> Bool [prec 59 special] .
endfm

fmod NAT is
  protecting BOOL .
  sorts Zero NzNat Nat .
  subsorts Zero NzNat < Nat .
  op s_ : Nat -> NzNat [ctor prec 15 special] .
  op _+_ : NzNat Nat -> NzNat [prec 33 special] .
  op _+_ : Nat Nat -> Nat [prec 33 special] .
  op _*_ : NzNat NzNat -> NzNat [prec 31 special] .
  op _*_ : Nat Nat -> Nat [prec 31 special] .
  op _quo_ : Nat NzNat -> Nat [prec 31 special] .
  op _rem_ : Nat NzNat -> Nat [prec 31 special] .
  op _<_ : Nat Nat -> Bool [prec 37 special] .
  op _<=_ : Nat Nat -> Bool [prec 37 special] .
  op _>_ : Nat Nat -> Bool [prec 37 special] .
  op _>=_ : Nat Nat -> Bool [prec 37 special] .
endfm

fmod INT is
  protecting NAT .
  sorts NzInt Int .
  subsorts NzNat < NzInt Nat < Int .
  op -_ : NzInt -> NzInt [ctor prec 15 special] .
  op -_ : Int -> Int [ctor prec 15 special] .
  op _+_ : Int Int -> Int [prec 33 special] .
  op _-_ : Int Int -> Int [prec 33 special] .
  op _*_ : NzInt NzInt -> NzInt [prec 31 special] .
  op _*_ : Int Int -> Int [prec 31 special] .
  op _quo_ : Int NzInt -> Int [prec 31 special] .
  op _rem_ : Int NzInt -> Int [prec 31 special] .
  op _<_ : Int Int -> Bool [prec 37 special] .
  op _<=_ : Int Int -> Bool [prec 37 special] .
  op _>_ : Int Int -> Bool [prec 37 special] .
  op _>=_ : Int Int -> Bool [prec 37 special] .
  op abs : Int -> Nat [special] .
endfm

fmod QID is
  protecting BOOL .
  sort Qid .
endfm
"""

# every module implicitly imports BOOL
IMPLICIT = ('BOOL',)


def _num(t):
    v = t.sym.value if not t.is_var else None
    return v if isinstance(v, int) else None


def _nums(args):
    out = []
    for a in args:
        v = _num(a)
        if v is None:
            return None
        out.append(v)
    return out


def _quo(a, b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def _rem(a, b):
    return a - b * _quo(a, b)


_ARITH = {
    's_': lambda a: a + 1,
    '-_': lambda a: -a,
    'abs': abs,
    '_+_': lambda a, b: a + b,
    '_-_': lambda a, b: a - b,
    '_*_': lambda a, b: a * b,
    '_quo_': lambda a, b: _quo(a, b) if b else None,
    '_rem_': lambda a, b: _rem(a, b) if b else None,
}

_COMPARE = {
    '_<_': lambda a, b: a < b,
    '_<=_': lambda a, b: a <= b,
    '_>_': lambda a, b: a > b,
    '_>=_': lambda a, b: a >= b,
}


def eval_strict(sig, name, args):
    """Evaluate a special operator on reduced arguments; None when stuck."""
    f = _ARITH.get(name)
    if f is not None:
        vs = _nums(args)
        if vs is None:
            return None
        r = f(*vs)
        return None if r is None else sig.literal(r)
    f = _COMPARE.get(name)
    if f is not None:
        vs = _nums(args)
        if vs is None:
            return None
        return sig.true if f(*vs) else sig.false
    T, F = sig.true, sig.false
    if name == '_==_':
        return T if args[0] is args[1] else F
    if name == '_=/=_':
        return F if args[0] is args[1] else T
    if name == 'not_':
        a = args[0]
        return F if a is T else T if a is F else None
    if name in ('_and_', '_or_', '_xor_', '_implies_'):
        a, b = args
        if name == '_and_':
            if a is F or b is F:
                return F
            if a is T:
                return b
            if b is T:
                return a
        elif name == '_or_':
            if a is T or b is T:
                return T
            if a is F:
                return b
            if b is F:
                return a
        elif name == '_xor_':
            if a in (T, F) and b in (T, F):
                return T if (a is T) != (b is T) else F
        else:
            if a is F or b is T:
                return T
            if a is T:
                return b
        return None
    return None


LAZY = {'if_then_else_fi', '_and-then_', '_or-else_'}


def eval_lazy(sig, name, args, reduce):
    """Short-circuit operators: reduce the guard first, then pick a branch.

    Returns a term still to be reduced, or None when the guard is stuck.
    """
    T, F = sig.true, sig.false
    g = reduce(args[0])
    if name == 'if_then_else_fi':
        if g is T:
            return args[1]
        if g is F:
            return args[2]
        return None
    if name == '_and-then_':
        if g is F:
            return F
        if g is T:
            return args[1]
        return None
    if g is T:
        return T
    if g is F:
        return args[1]
    return None


def if_sort(args):
    a, b = args[1].sort, args[2].sort
    if b in a.supers:
        return b
    if a in b.supers:
        return a
    common = [s for s in a.supers if s in b.supers and not s.is_kind]
    for c in common:
        if all(c is d or d in c.supers for d in common):
            return c
    return a.kind
