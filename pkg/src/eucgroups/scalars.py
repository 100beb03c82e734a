"""Exact real scalars: rational functions over Q in declared independent constants.

Every coordinate handled by the package is an :class:`ExactScalar`.  Zero
testing is purely symbolic.  Ordering is decided by exact evaluation at the
constants' decimal realizations, which are rationals.

Textual syntax (used by all file formats)::

    3/2 + 2*t1 - t1^2*t2
    (1 + t)/(t - 2)
"""

from __future__ import annotations

import enum
import random
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import DivisionByZero, RealizationPole, ScalarSyntaxError

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_DECIMAL_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)\Z")


@dataclass(frozen=True)
class Constant:
    """A formal real constant with a finite decimal realization."""

    name: str
    literal: str

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"invalid constant name {self.name!r}")
        if not _DECIMAL_RE.match(self.literal):
            raise ValueError(f"realization of {self.name} must be a decimal literal, got {self.literal!r}")

    @cached_property
    def realization(self) -> Fraction:
        return Fraction(self.literal)

    def sort_key(self):
        return (self.name, self.literal)

    def __repr__(self):
        return f"Constant({self.name}={self.literal[:12]}{'...' if len(self.literal) > 12 else ''})"


# A monomial is a sorted tuple of (Constant, exponent) pairs; () is the monomial 1.
Monomial = tuple
Poly = dict

ONE_MONO: Monomial = ()


def mono_key(m: Monomial):
    return (sum(e for _, e in m), tuple((c.name, c.literal, e) for c, e in m))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = {}
    for c, e in a + b:
        powers[c] = powers.get(c, 0) + e
    return tuple(sorted(((c, e) for c, e in powers.items() if e), key=lambda ce: ce[0].sort_key()))


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(c.name if e == 1 else f"{c.name}^{e}" for c, e in m)


def _padd(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(p: Poly, q: Poly) -> Poly:
    if len(p) == 1 and ONE_MONO in p:
        c = p[ONE_MONO]
        return {m: c * v for m, v in q.items()}
    if len(q) == 1 and ONE_MONO in q:
        c = q[ONE_MONO]
        return {m: c * v for m, v in p.items()}
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _pscale(p: Poly, c) -> Poly:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def _is_const_poly(p: Poly) -> bool:
    return not p or (len(p) == 1 and ONE_MONO in p)


def _peval(p: Poly) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        term = Fraction(c)
        for const, e in m:
            term *= const.realization ** e
        total += term
    return total


@lru_cache(maxsize=None)
def _sympy_ring(nvars: int):
    from sympy.polys.domains import QQ
    from sympy.polys.rings import ring

    R, *_ = ring(",".join(f"x{i}" for i in range(nvars)), QQ)
    return R


def _cancel(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Divide numerator and denominator by their polynomial gcd."""
    from sympy.polys.domains import QQ

    consts = sorted({c for p in (num, den) for m in p for c, _ in m}, key=Constant.sort_key)
    index = {c: i for i, c in enumerate(consts)}
    R = _sympy_ring(len(consts))

    def to_sympy(p):
        d = {}
        for m, c in p.items():
            exps = [0] * len(consts)
            for const, e in m:
                exps[index[const]] = e
            d[tuple(exps)] = QQ(c.numerator, c.denominator)
        return R.from_dict(d)

    def from_sympy(p):
        out = {}
        for exps, c in p.to_dict().items():
            m = tuple((consts[i], e) for i, e in enumerate(exps) if e)
            out[m] = Fraction(int(c.numerator), int(c.denominator))
        return out

    sn, sd = to_sympy(num), to_sympy(den)
    g = sn.gcd(sd)
    if g == R.one or g.is_ground:
        return num, den
    return from_sympy(sn.exquo(g)), from_sympy(sd.exquo(g))


Rational = Union[int, Fraction]


class ExactScalar:
    """Immutable element of Q(c1, ..., ck) in canonical form.

    The denominator is monic with respect to a graded ordering of monomials
    and shares no polynomial factor with the numerator.  Two scalars are equal
    iff their canonical forms coincide.
    """

    __slots__ = ("_num", "_den", "_hash", "_value")

    def __init__(self, value: Rational = 0):
        q = Fraction(value)
        self._num = {ONE_MONO: q} if q else {}
        self._den = {ONE_MONO: Fraction(1)}
        self._hash = None
        self._value = q

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "ExactScalar":
        obj = cls.__new__(cls)
        obj._num = num
        obj._den = den
        obj._hash = None
        obj._value = None
        return obj

    @classmethod
    def from_fraction(cls, num: Poly, den: Poly | None = None) -> "ExactScalar":
        """Build from monomial->coefficient maps, normalizing."""
        num = {m: Fraction(c) for m, c in num.items() if c}
        if den is None:
            return cls._raw(num, {ONE_MONO: Fraction(1)})
        den = {m: Fraction(c) for m, c in den.items() if c}
        if not den:
            raise DivisionByZero("denominator is symbolically zero")
        return _normalize(num, den)

    @classmethod
    def of(cls, constant: Constant) -> "ExactScalar":
        return cls._raw({((constant, 1),): Fraction(1)}, {ONE_MONO: Fraction(1)})

    # -- structure ---------------------------------------------------------
    @property
    def numerator(self) -> Mapping[Monomial, Fraction]:
        return dict(self._num)

    @property
    def denominator(self) -> Mapping[Monomial, Fraction]:
        return dict(self._den)

    def is_zero(self) -> bool:
        return not self._num

    def is_polynomial(self) -> bool:
        return _is_const_poly(self._den)

    def is_rational(self) -> bool:
        return self.is_polynomial() and _is_const_poly(self._num)

    def degree(self) -> int:
        """Total degree of the numerator (denominator must be 1 to be meaningful)."""
        return max((mono_degree(m) for m in self._num), default=0)

    def constants(self) -> set[Constant]:
        return {c for p in (self._num, self._den) for m in p for c, _ in m}

    def monomials(self) -> list[Monomial]:
        return sorted(self._num, key=mono_key)

    def coefficient(self, monomial: Monomial) -> Fraction:
        if not self.is_polynomial():
            raise ValueError("coefficient() requires a polynomial scalar")
        return self._num.get(monomial, Fraction(0))

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._num.get(ONE_MONO, Fraction(0))

    # -- evaluation ----------------------------------------------------------
    def evaluate(self) -> Fraction:
        if self._value is None:
            d = _peval(self._den)
            if d == 0:
                raise RealizationPole(f"denominator of {self} vanishes at the realization")
            self._value = _peval(self._num) / d
        return self._value

    def sign(self) -> int:
        if not self._num:
            return 0
        v = self.evaluate()
        return (v > 0) - (v < 0)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other._num:
            return self
        if not self._num:
            return other
        if _is_one(self._den) and _is_one(other._den):
            return ExactScalar._raw(_padd(self._num, other._num), self._den)
        num = _padd(_pmul(self._num, other._den), _pmul(other._num, self._den))
        return _normalize(num, _pmul(self._den, other._den))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw({m: -c for m, c in self._num.items()}, self._den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self._num or not other._num:
            return ZERO
        if _is_one(self._den) and _is_one(other._den):
            return ExactScalar._raw(_pmul(self._num, other._num), self._den)
        return _normalize(_pmul(self._num, other._num), _pmul(self._den, other._den))

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if not self._num:
            raise DivisionByZero("division by symbolic zero")
        return _normalize(dict(self._den), dict(self._num))

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other._num:
            raise DivisionByZero(f"division of {self} by symbolic zero")
        if other.is_rational():
            return self.scale(1 / other.rational_value())
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, q: Rational) -> "ExactScalar":
        q = Fraction(q)
        if not q or not self._num:
            return ZERO
        return ExactScalar._raw(_pscale(self._num, q), self._den)

    # -- comparisons ---------------------------------------------------------
    def __bool__(self):
        return bool(self._num)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.rational_value())
            else:
                self._hash = hash((frozenset(self._num.items()), frozenset(self._den.items())))
        return self._hash

    def __lt__(self, other):
        return compare(self, other) is Ordering.LESS

    def __gt__(self, other):
        return compare(self, other) is Ordering.GREATER

    def __repr__(self):
        return f"ExactScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _is_one(p: Poly) -> bool:
    return len(p) == 1 and p.get(ONE_MONO) == 1


def _coerce(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar(x)
    if isinstance(x, Constant):
        return ExactScalar.of(x)
    return NotImplemented


def _normalize(num: Poly, den: Poly) -> ExactScalar:
    if not num:
        return ZERO
    if _is_const_poly(den):
        c = den[ONE_MONO]
        if c == 1:
            return ExactScalar._raw(num, {ONE_MONO: Fraction(1)})
        return ExactScalar._raw(_pscale(num, 1 / c), {ONE_MONO: Fraction(1)})
    if num == den:
        return ONE
    if not _is_const_poly(num):
        num, den = _cancel(num, den)
        if _is_const_poly(den):
            return _normalize(num, den)
    lead = den[max(den, key=mono_key)]
    if lead != 1:
        num, den = _pscale(num, 1 / lead), _pscale(den, 1 / lead)
    return ExactScalar._raw(num, den)


ZERO = ExactScalar(0)
ONE = ExactScalar(1)


def as_scalar(x) -> ExactScalar:
    """Coerce ints, Fractions, Constants and numeric strings to ExactScalar."""
    if isinstance(x, str):
        return parse_scalar(x)
    y = _coerce(x)
    if y is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to ExactScalar")
    return y


# -- functional API ------------------------------------------------------------

def add(a, b) -> ExactScalar:
    return as_scalar(a) + as_scalar(b)


def sub(a, b) -> ExactScalar:
    return as_scalar(a) - as_scalar(b)


def mul(a, b) -> ExactScalar:
    return as_scalar(a) * as_scalar(b)


def div(a, b) -> ExactScalar:
    return as_scalar(a) / as_scalar(b)


def negate(a) -> ExactScalar:
    return -as_scalar(a)


def scale_by_rational(a, q: Rational) -> ExactScalar:
    return as_scalar(a).scale(q)


def is_zero(a) -> bool:
    return as_scalar(a).is_zero()


def evaluate(a) -> Fraction:
    return as_scalar(a).evaluate()


def sign(a) -> int:
    return as_scalar(a).sign()


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    # symbolically distinct, yet equal at the realization
    EQUAL_EVALUATION = "equal-evaluation"


def compare(a, b) -> Ordering:
    d = as_scalar(a) - as_scalar(b)
    if d.is_zero():
        return Ordering.EQUAL
    v = d.evaluate()
    if v == 0:
        return Ordering.EQUAL_EVALUATION
    return Ordering.LESS if v < 0 else Ordering.GREATER


# -- constant registry ---------------------------------------------------------

def fresh_realization(seed: int, name: str = "") -> str:
    """60 significant digits in the open interval (1, 2), deterministic in (seed, name)."""
    rng = random.Random(f"{seed}:{name}")
    digits = [str(rng.randrange(10)) for _ in range(59)]
    if digits[-1] == "0":
        digits[-1] = str(1 + rng.randrange(9))
    return "1." + "".join(digits)


class ConstantBasis:
    """Append-only registry of named constants; "1" is implicit.

    Minting is the only mutating operation and is serialized by a lock.
    """

    def __init__(self, constants: Iterable[Constant] = ()):
        self._by_name: dict[str, Constant] = {}
        self._values: dict[Fraction, str] = {}
        self._lock = threading.Lock()
        for c in constants:
            self.declare(c)

    def declare(self, constant: Constant) -> Constant:
        with self._lock:
            return self._declare(constant)

    def _declare(self, constant: Constant) -> Constant:
        known = self._by_name.get(constant.name)
        if known is not None:
            if known == constant:
                return known
            raise ValueError(f"constant {constant.name!r} already declared with another realization")
        v = constant.realization
        if v == 1:
            raise ValueError(f"realization of {constant.name} coincides with the constant 1")
        if v in self._values:
            raise ValueError(f"realization of {constant.name} coincides with that of {self._values[v]}")
        self._by_name[constant.name] = constant
        self._values[v] = constant.name
        return constant

    def add(self, name: str, literal: str) -> Constant:
        return self.declare(Constant(name, literal))

    def fresh(self, name: str, seed: int = 0) -> Constant:
        return self.declare(Constant(name, fresh_realization(seed, name)))

    def mint(self, prefix: str = "c", seed: int = 0) -> Constant:
        """Declare a new constant named ``prefix<k>`` for the first unused k."""
        with self._lock:
            k = 0
            while f"{prefix}{k}" in self._by_name:
                k += 1
            name = f"{prefix}{k}"
            return self._declare(Constant(name, fresh_realization(seed, name)))

    def __getitem__(self, name: str) -> Constant:
        return self._by_name[name]

    def get(self, name: str, default=None):
        return self._by_name.get(name, default)

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Constant]:
        return iter(list(self._by_name.values()))

    def __len__(self) -> int:
        return len(self._by_name)

    @property
    def names(self) -> list[str]:
        return list(self._by_name)

    def scalar(self, name: str) -> ExactScalar:
        return ExactScalar.of(self._by_name[name])

    def parse(self, text: str) -> ExactScalar:
        return parse_scalar(text, self)

    def copy(self) -> "ConstantBasis":
        return ConstantBasis(self)


# -- textual syntax ------------------------------------------------------------

def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_poly(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for m in sorted(p, key=mono_key):
        c = p[m]
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _format_rational(a)
        elif a == 1:
            body = format_monomial(m)
        else:
            body = f"{_format_rational(a)}*{format_monomial(m)}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def format_scalar(a: ExactScalar) -> str:
    if _is_one(a._den):
        return _format_poly(a._num)
    return f"({_format_poly(a._num)})/({_format_poly(a._den)})"


_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ScalarSyntaxError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, resolve):
        self.tokens = _tokenize(text)
        self.i = 0
        self.resolve = resolve

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, col = self.take()
        if v != value:
            raise ScalarSyntaxError(f"expected {value!r}, found {v or 'end of input'!r}", col)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, col = self.take()
            rhs = self.unary()
            if op == "*":
                node = node * rhs
            else:
                if rhs.is_zero():
                    raise ScalarSyntaxError("division by zero", col)
                node = node / rhs
        return node

    def unary(self):
        kind, v, _ = self.peek()
        if kind == "op" and v in "+-":
            self.take()
            operand = self.unary()
            return -operand if v == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            kind, v, col = self.take()
            if kind != "num" or not v.isdigit():
                raise ScalarSyntaxError("exponent must be an integer", col)
            n = int(v)
            if neg:
                if base.is_zero():
                    raise ScalarSyntaxError("division by zero", col)
                n = -n
            return base ** n
        return base

    def atom(self):
        kind, v, col = self.take()
        if kind == "num":
            return ExactScalar(Fraction(v))
        if kind == "name":
            const = self.resolve(v)
            if const is None:
                raise ScalarSyntaxError(f"undeclared constant {v!r}", col)
            return ExactScalar.of(const)
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ScalarSyntaxError(f"unexpected {v or 'end of input'!r}", col)


def parse_scalar(text: str, constants: ConstantBasis | Mapping[str, Constant] | Callable | None = None) -> ExactScalar:
    """Parse the textual scalar syntax; names are resolved through ``constants``."""
    if constants is None:
        resolve = lambda name: None  # noqa: E731
    elif callable(constants) and not isinstance(constants, (ConstantBasis, Mapping)):
        resolve = constants
    else:
        resolve = constants.get
    p = _Parser(text, resolve)
    if p.peek()[0] == "end":
        raise ScalarSyntaxError("empty scalar", 1)
    node = p.expr()
    kind, v, col = p.peek()
    if kind != "end":
        raise ScalarSyntaxError(f"unexpected {v!r}", col)
    return node
