"""Canonical scalar expressions over exact rationals.

An :class:`Expr` is a finite sum ``c_1*m_1 + ... + c_r*m_r`` with
:class:`~fractions.Fraction` coefficients. Each monomial ``m_i`` is a product of

* integer powers of atoms: coordinates, ``ln(P)`` and opaque denominators ``P^-k``,
* at most one ``exp(A)`` factor (exponents of a product are added),
* at most one ``sin(B)`` or ``cos(B)`` factor (products are rewritten with the
  product-to-sum identities, arguments are sign-normalised).

Every constructor returns the canonical form, so expressions equal under the
ring axioms and those identities are structurally equal. Anything beyond that
(e.g. cancelling ``(x + 1)/(x + 1)``) is left to the sampling tier of
:func:`lcsreduce.symbolic.zero.is_zero`.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np

Number = Union[int, Fraction]

_VAR, _LN, _INV = 0, 1, 2


class Atom:
    """Multiplicative generator: a coordinate, ``ln(arg)`` or the base of ``arg^-k``."""

    __slots__ = ("kind", "name", "arg", "key", "_hash", "vars")

    def __init__(self, kind: int, name: str | None = None, arg: Expr | None = None):
        self.kind = kind
        self.name = name
        self.arg = arg
        if kind == _VAR:
            self.key = (0, name)
            self.vars = frozenset((name,))
        else:
            self.key = (kind, str(arg))
            self.vars = arg.vars
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Atom) and self.key == other.key

    def __hash__(self):
        return self._hash

    def render(self, power: int) -> str:
        if self.kind == _VAR:
            base = self.name
        elif self.kind == _LN:
            base = f"ln({self.arg})"
        else:
            base = f"({self.arg})"
        return base if power == 1 else f"{base}^{power}"

    def as_expr(self) -> Expr:
        """The atom's value as an expression (``P`` for a denominator atom)."""
        if self.kind == _INV:
            return self.arg
        return Expr._mono(Mono(((self, 1),)))


class Mono:
    __slots__ = ("factors", "exp", "trig", "key", "_hash", "vars")

    def __init__(self, factors: tuple = (), exp: Expr | None = None, trig: tuple | None = None):
        self.factors = factors
        self.exp = exp
        self.trig = trig
        self.key = (
            tuple((a.key, k) for a, k in factors),
            str(exp) if exp is not None else "",
            (trig[0], str(trig[1])) if trig is not None else ("", ""),
        )
        self._hash = hash(self.key)
        vs = set()
        for a, _ in factors:
            vs |= a.vars
        if exp is not None:
            vs |= exp.vars
        if trig is not None:
            vs |= trig[1].vars
        self.vars = frozenset(vs)

    def __eq__(self, other):
        return isinstance(other, Mono) and self.key == other.key

    def __hash__(self):
        return self._hash

    @property
    def is_one(self) -> bool:
        return not self.factors and self.exp is None and self.trig is None

    def render(self) -> str:
        parts = [a.render(k) for a, k in self.factors]
        if self.exp is not None:
            parts.append(f"exp({self.exp})")
        if self.trig is not None:
            parts.append(f"{self.trig[0]}({self.trig[1]})")
        return "*".join(parts)

    def with_factor(self, atom: Atom, delta: int) -> Mono:
        powers = dict(self.factors)
        k = powers.get(atom, 0) + delta
        if k:
            powers[atom] = k
        else:
            powers.pop(atom, None)
        return Mono(_sorted_factors(powers), self.exp, self.trig)


def _sorted_factors(powers: Mapping[Atom, int]) -> tuple:
    return tuple(sorted(((a, k) for a, k in powers.items() if k), key=lambda p: p[0].key))


def _build(acc: Mapping[Mono, Fraction]) -> Expr:
    terms = tuple(sorted(((m, c) for m, c in acc.items() if c), key=lambda t: t[0].key))
    return Expr(terms)


def _accumulate(acc: dict, mono: Mono, coeff: Fraction) -> None:
    acc[mono] = acc.get(mono, 0) + coeff


ONE_MONO = Mono()


class Expr:
    """Immutable canonical scalar expression. Build with :func:`var`, :func:`const`,
    arithmetic operators and :func:`exp`, :func:`ln`, :func:`sin`, :func:`cos`."""

    __slots__ = ("terms", "_str", "_hash", "_vars")

    def __init__(self, terms: tuple = ()):
        self.terms = terms
        self._str = None
        self._hash = None
        self._vars = None

    @staticmethod
    def _mono(mono: Mono, coeff: Number = 1) -> Expr:
        return _build({mono: Fraction(coeff)})

    # -- inspection -------------------------------------------------------
    @property
    def vars(self) -> frozenset:
        if self._vars is None:
            vs = set()
            for m, _ in self.terms:
                vs |= m.vars
            self._vars = frozenset(vs)
        return self._vars

    free_vars = vars

    def is_zero_literal(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m.is_one for m, _ in self.terms)

    def constant_value(self) -> Fraction | None:
        """The rational value if the expression is a constant, else ``None``."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and self.terms[0][0].is_one:
            return self.terms[0][1]
        return None

    def depends_on(self, name: str) -> bool:
        return name in self.vars

    def __len__(self):
        return len(self.terms)

    def __str__(self):
        if self._str is None:
            self._str = _render(self)
        return self._str

    def __repr__(self):
        return f"Expr({str(self)!r})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.constant_value() == other
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for m, c in other.terms:
            _accumulate(acc, m, c)
        return _build(acc)

    __radd__ = __add__

    def __neg__(self):
        return Expr(tuple((m, -c) for m, c in self.terms))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        c = other.constant_value()
        if c is not None:
            if c == 0:
                raise ZeroDivisionError("division by the zero expression")
            return self.scale(1 / c)
        return _mul(self, reciprocal(other))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _mul(other, reciprocal(self))

    def __pow__(self, n):
        if isinstance(n, Expr):
            c = n.constant_value()
            if c is None or c.denominator != 1:
                raise ValueError("only integer powers are supported")
            n = int(c)
        if isinstance(n, Fraction):
            if n.denominator != 1:
                raise ValueError("only integer powers are supported")
            n = int(n)
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return reciprocal(self) ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = _mul(result, base)
            n >>= 1
            if n:
                base = _mul(base, base)
        return result

    def scale(self, c: Number) -> Expr:
        c = Fraction(c)
        if c == 0:
            return ZERO
        return Expr(tuple((m, k * c) for m, k in self.terms))

    # -- numerics ---------------------------------------------------------
    def evaluate(self, env: Mapping[str, object], memo: dict | None = None):
        """Numeric value with ``env`` mapping coordinate names to floats or arrays."""
        if memo is None:
            memo = {}
        total = 0.0
        for val in self.term_values(env, memo):
            total = total + val
        return total

    def term_values(self, env, memo: dict | None = None) -> list:
        if memo is None:
            memo = {}
        return [float(c) * _mono_value(m, env, memo) for m, c in self.terms]

    def __call__(self, **env):
        return self.evaluate(env)


def _coerce(x) -> Expr | None:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return const(x)
    return None


def _render(e: Expr) -> str:
    if not e.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(e.terms):
        body = m.render()
        if not body:
            text = str(c)
        elif c == 1:
            text = body
        elif c == -1:
            text = "-" + body
        else:
            text = f"{c}*{body}"
        if i == 0:
            out.append(text)
        elif text.startswith("-"):
            out.append(" - " + text[1:])
        else:
            out.append(" + " + text)
    return "".join(out)


def _atom_value(a: Atom, env, memo):
    if a.kind == _VAR:
        try:
            return env[a.name]
        except KeyError:
            raise KeyError(f"no value for coordinate {a.name!r}") from None
    inner = _cached_eval(a.arg, env, memo)
    if a.kind == _LN:
        return np.log(inner)
    return inner


def _cached_eval(e: Expr, env, memo):
    v = memo.get(e)
    if v is None:
        v = e.evaluate(env, memo)
        memo[e] = v
    return v


def _mono_value(m: Mono, env, memo):
    val = 1.0
    for a, k in m.factors:
        base = _atom_value(a, env, memo)
        val = val * (base ** k if k > 0 else 1.0 / base ** (-k))
    if m.exp is not None:
        val = val * np.exp(_cached_eval(m.exp, env, memo))
    if m.trig is not None:
        arg = _cached_eval(m.trig[1], env, memo)
        val = val * (np.sin(arg) if m.trig[0] == "sin" else np.cos(arg))
    return val


# -- multiplication -----------------------------------------------------------

def _normalize_trig(kind: str, arg: Expr) -> tuple[Fraction, tuple | None]:
    """Return ``(sign, trig)`` with ``trig`` sign-normalised; sign 0 means the
    factor vanishes and ``trig is None`` means the factor is the constant 1."""
    if not arg.terms:
        return (Fraction(0), None) if kind == "sin" else (Fraction(1), None)
    if arg.terms[0][1] < 0:
        arg = -arg
        return (Fraction(-1) if kind == "sin" else Fraction(1)), (kind, arg)
    return Fraction(1), (kind, arg)


def _trig_product(t1: tuple, t2: tuple) -> list[tuple[Fraction, tuple | None]]:
    (k1, a), (k2, b) = t1, t2
    half = Fraction(1, 2)
    if k1 == "sin" and k2 == "sin":
        raw = [(half, "cos", a - b), (-half, "cos", a + b)]
    elif k1 == "cos" and k2 == "cos":
        raw = [(half, "cos", a - b), (half, "cos", a + b)]
    else:
        if k1 == "cos":
            a, b = b, a
        raw = [(half, "sin", a + b), (half, "sin", a - b)]
    out = []
    for c, kind, arg in raw:
        sign, trig = _normalize_trig(kind, arg)
        if sign:
            out.append((c * sign, trig))
    return out


def _mono_mul(m1: Mono, m2: Mono) -> list[tuple[Mono, Fraction]]:
    if m1.is_one:
        return [(m2, Fraction(1))]
    if m2.is_one:
        return [(m1, Fraction(1))]
    if m2.factors:
        powers = dict(m1.factors)
        for a, k in m2.factors:
            powers[a] = powers.get(a, 0) + k
        factors = _sorted_factors(powers)
    else:
        factors = m1.factors
    if m1.exp is not None and m2.exp is not None:
        ex = m1.exp + m2.exp
        ex = ex if ex.terms else None
    else:
        ex = m1.exp if m1.exp is not None else m2.exp
    if m1.trig is not None and m2.trig is not None:
        return [(Mono(factors, ex, t), c) for c, t in _trig_product(m1.trig, m2.trig)]
    trig = m1.trig if m1.trig is not None else m2.trig
    return [(Mono(factors, ex, trig), Fraction(1))]


def _mul(a: Expr, b: Expr) -> Expr:
    if not a.terms or not b.terms:
        return ZERO
    ca, cb = a.constant_value(), b.constant_value()
    if ca is not None:
        return b.scale(ca)
    if cb is not None:
        return a.scale(cb)
    acc: dict = {}
    for m1, c1 in a.terms:
        for m2, c2 in b.terms:
            for m, c in _mono_mul(m1, m2):
                _accumulate(acc, m, c1 * c2 * c)
    return _build(acc)


def reciprocal(e: Expr) -> Expr:
    """``1/e``. Common monomial content is pulled out exactly; what remains
    becomes an opaque denominator atom normalised to leading coefficient 1."""
    if not e.terms:
        raise ZeroDivisionError("reciprocal of the zero expression")
    return _reciprocal(e)


@lru_cache(maxsize=20000)
def _reciprocal(e: Expr) -> Expr:
    lead = e.terms[0][1]
    # common content: min exponent of every atom over all terms (absent = 0)
    per_term = [dict(m.factors) for m, _ in e.terms]
    common: dict[Atom, int] = {}
    for a in {a for p in per_term for a in p}:
        exps = [p.get(a, 0) for p in per_term]
        # denominator atoms only carry negative powers
        k = max(exps) if a.kind == _INV else min(exps)
        if k:
            common[a] = k
    exps = {m.exp for m, _ in e.terms}
    common_exp = exps.pop() if len(exps) == 1 else None

    rest: dict = {}
    for m, c in e.terms:
        powers = dict(m.factors)
        for a, k in common.items():
            powers[a] = powers.get(a, 0) - k
        ex = None if common_exp is not None else m.exp
        rest[Mono(_sorted_factors(powers), ex, m.trig)] = c / lead
    base = _build(rest)

    out = const(1 / lead)
    inv_powers: dict[Atom, int] = {}
    for a, k in common.items():
        if a.kind == _INV:
            out = _mul(out, a.arg ** (-k))
        else:
            inv_powers[a] = -k
    if base.constant_value() is None:
        inv_powers[Atom(_INV, arg=base)] = -1
    ex = -common_exp if common_exp is not None else None
    return _mul(out, Expr._mono(Mono(_sorted_factors(inv_powers), ex, None)))


# -- elementary functions -----------------------------------------------------

def exp(e) -> Expr:
    e = _coerce(e)
    ln_part = ONE
    rest: dict = {}
    for m, c in e.terms:
        if (len(m.factors) == 1 and m.factors[0][1] == 1 and m.factors[0][0].kind == _LN
                and m.exp is None and m.trig is None and c.denominator == 1):
            ln_part = _mul(ln_part, m.factors[0][0].arg ** int(c))
        else:
            rest[m] = c
    arg = _build(rest)
    if not arg.terms:
        return ln_part
    return _mul(ln_part, Expr._mono(Mono((), arg, None)))


def ln(e) -> Expr:
    e = _coerce(e)
    if not e.terms:
        raise ValueError("ln(0) is undefined")
    if len(e.terms) == 1:
        m, c = e.terms[0]
        if c > 0 and m.trig is None:
            out = ZERO
            if c != 1:
                out = Expr._mono(Mono(((Atom(_LN, arg=const(c)), 1),)))
            for a, k in m.factors:
                if a.kind == _INV:
                    out = out + ln(a.arg).scale(k)
                else:
                    out = out + Expr._mono(Mono(((Atom(_LN, arg=a.as_expr()), 1),)), k)
            if m.exp is not None:
                out = out + m.exp
            return out
    return Expr._mono(Mono(((Atom(_LN, arg=e), 1),)))


def _trig_fn(kind: str, e) -> Expr:
    e = _coerce(e)
    sign, trig = _normalize_trig(kind, e)
    if not sign:
        return ZERO
    if trig is None:
        return const(sign)
    return Expr._mono(Mono((), None, trig), sign)


def sin(e) -> Expr:
    return _trig_fn("sin", e)


def cos(e) -> Expr:
    return _trig_fn("cos", e)


def var(name: str) -> Expr:
    return Expr._mono(Mono(((Atom(_VAR, name=name), 1),)))


def const(c: Number) -> Expr:
    c = Fraction(c)
    if c == 0:
        return Expr(())
    return Expr(((ONE_MONO, c),))


ZERO = Expr(())
ONE = Expr(((ONE_MONO, Fraction(1)),))


def as_expr(x) -> Expr:
    e = _coerce(x)
    if e is None:
        raise TypeError(f"cannot interpret {x!r} as a scalar expression")
    return e


# -- differentiation and substitution -----------------------------------------

def differentiate(e: Expr, v: str) -> Expr:
    """Exact partial derivative of ``e`` in coordinate ``v``."""
    if v not in e.vars:
        return ZERO
    return _diff(e, v)


@lru_cache(maxsize=50000)
def _diff(e: Expr, v: str) -> Expr:
    out = ZERO
    for m, c in e.terms:
        if v not in m.vars:
            continue
        for a, k in m.factors:
            if v not in a.vars:
                continue
            if a.kind == _VAR:
                inner = ONE
            elif a.kind == _LN:
                inner = _mul(differentiate(a.arg, v), reciprocal(a.arg))
            else:
                inner = differentiate(a.arg, v)
            out = out + _mul(Expr._mono(m.with_factor(a, -1), c * k), inner)
        if m.exp is not None and v in m.exp.vars:
            out = out + _mul(Expr._mono(m, c), differentiate(m.exp, v))
        if m.trig is not None and v in m.trig[1].vars:
            kind, arg = m.trig
            swapped = Mono(m.factors, m.exp, ("cos" if kind == "sin" else "sin", arg))
            sign = 1 if kind == "sin" else -1
            out = out + _mul(Expr._mono(swapped, c * sign), differentiate(arg, v))
    return out


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace coordinates by expressions simultaneously."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    if not (e.vars & mapping.keys()):
        return e
    return _subs(e, mapping, {})


def _subs(e: Expr, mapping, memo) -> Expr:
    if e in memo:
        return memo[e]
    out = ZERO
    keys = mapping.keys()
    for m, c in e.terms:
        if not (m.vars & keys):
            out = out + Expr._mono(m, c)
            continue
        term = const(c)
        for a, k in m.factors:
            if a.kind == _VAR:
                val = mapping.get(a.name)
                val = var(a.name) if val is None else val
            elif a.kind == _LN:
                val = ln(_subs(a.arg, mapping, memo))
            else:
                val = _subs(a.arg, mapping, memo)
            term = _mul(term, val ** k)
        if m.exp is not None:
            term = _mul(term, exp(_subs(m.exp, mapping, memo)))
        if m.trig is not None:
            term = _mul(term, _trig_fn(m.trig[0], _subs(m.trig[1], mapping, memo)))
        out = out + term
    memo[e] = out
    return out


def linear_coefficient(e: Expr, v: str) -> tuple[Fraction, Expr] | None:
    """If ``e = a*v + r`` with rational ``a`` and ``r`` free of ``v``, return ``(a, r)``."""
    a = differentiate(e, v).constant_value()
    if a is None:
        return None
    r = e - var(v).scale(a)
    if v in r.vars:
        return None
    return a, r


def expr_sum(items: Iterable[Expr]) -> Expr:
    acc: dict = {}
    for e in items:
        for m, c in e.terms:
            _accumulate(acc, m, c)
    return _build(acc)
