"""Exact coefficients: rational functions over the Gaussian rationals.

A :class:`CoeffExpr` is a reduced fraction ``num/den`` of multivariate
polynomials with coefficients in ``Q(i)`` over an ordered tuple of named
formal parameters.  Arithmetic is delegated to sympy's sparse polynomial
rings over ``QQ_I``; the canonical form (coprime numerator/denominator,
monic denominator in lex order) makes equality structural.

Expression grammar accepted by :func:`parse_expr`::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("+" | "-") unary | power
    power    := atom ("^" exponent)?
    exponent := ["+" | "-"] INT | "(" ["+" | "-"] INT ")"
    atom     := INT | "i" | NAME | "(" expr ")"

``i`` is the imaginary unit and may not be used as a parameter name.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from sympy import QQ, QQ_I, Symbol, ring

__all__ = [
    "CoeffExpr",
    "CoeffError",
    "DivisionByZeroPolynomial",
    "DoesNotExist",
    "ExpressionSyntaxError",
    "GaussRational",
    "PoleAtPoint",
    "ResidualParameters",
    "UnassignedParameter",
    "UndeclaredParameter",
    "as_coeff",
    "eval_at",
    "format_gauss",
    "gauss",
    "gauss_to_complex",
    "limit_at",
    "parse_expr",
    "parse_gauss",
    "partial_limit",
]

GaussRational = type(QQ_I(0, 0))

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class CoeffError(ArithmeticError):
    """Base class for coefficient-ring failures."""


class ExpressionSyntaxError(SyntaxError):
    """Malformed coefficient expression; ``position`` is a 0-based offset."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position
        self.offset = position + 1


class UndeclaredParameter(CoeffError, KeyError):
    def __init__(self, name: str, declared: Sequence[str] = ()):
        super().__init__(f"parameter {name!r} is not declared (declared: {list(declared)})")
        self.name = name

    __str__ = ArithmeticError.__str__


class DivisionByZeroPolynomial(CoeffError, ZeroDivisionError):
    """Denominator is identically the zero polynomial."""


class PoleAtPoint(CoeffError, ZeroDivisionError):
    """Reduced denominator vanishes at the evaluation point."""


class DoesNotExist(CoeffError):
    """The limit has a genuine pole in reduced form."""


class ResidualParameters(CoeffError):
    """Free parameters other than the limit variable remain."""


class UnassignedParameter(CoeffError, KeyError):
    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        super().__init__(f"no value assigned to parameter(s) {list(self.names)}")

    __str__ = ArithmeticError.__str__


# --- Gaussian rationals -------------------------------------------------------


def gauss(value) -> GaussRational:
    """Convert an exact scalar to an element of ``QQ_I``.

    Accepts ints, :class:`fractions.Fraction`, ``QQ``/``QQ_I`` elements,
    complex numbers with integral parts and strings in the expression grammar.
    Floats are rejected unless they are integral.
    """
    if isinstance(value, GaussRational):
        return value
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return QQ_I(value, 0)
    if isinstance(value, Fraction):
        return QQ_I(QQ(value.numerator, value.denominator), 0)
    if isinstance(value, CoeffExpr):
        return value.value()
    if isinstance(value, str):
        return parse_gauss(value)
    if isinstance(value, complex):
        if value.real.is_integer() and value.imag.is_integer():
            return QQ_I(int(value.real), int(value.imag))
        raise TypeError(f"inexact complex value {value!r}; pass Fractions or a string")
    if isinstance(value, float):
        if value.is_integer():
            return QQ_I(int(value), 0)
        raise TypeError(f"inexact float {value!r}; pass a Fraction or a string")
    try:
        return QQ_I.convert(value)
    except Exception as exc:  # sympy raises CoercionFailed
        raise TypeError(f"cannot convert {value!r} to a Gaussian rational") from exc


def parse_gauss(text: str) -> GaussRational:
    """Parse a parameter-free expression into a Gaussian rational."""
    return parse_expr(text, ()).value()


def gauss_to_complex(value: GaussRational) -> complex:
    return complex(float(value.x), float(value.y))


def _gauss_real_fraction(value: GaussRational) -> Fraction:
    return Fraction(int(value.x.numerator), int(value.x.denominator))


def _fmt_rational(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_gauss(value: GaussRational) -> str:
    """Canonical text of a Gaussian rational, e.g. ``(1/2 + i)`` or ``-3*i``."""
    re_, im = value.x, value.y
    if im == 0:
        return _fmt_rational(re_)
    if im == 1:
        im_txt = "i"
    elif im == -1:
        im_txt = "-i"
    else:
        im_txt = f"{_fmt_rational(im)}*i"
    if re_ == 0:
        return im_txt
    if im_txt.startswith("-"):
        return f"({_fmt_rational(re_)} - {im_txt[1:]})"
    return f"({_fmt_rational(re_)} + {im_txt})"


# --- polynomial rings ---------------------------------------------------------


@lru_cache(maxsize=None)
def _ring(params: tuple[str, ...]):
    return ring([Symbol(p) for p in params], QQ_I)[0]


def _check_params(params: Sequence[str]) -> tuple[str, ...]:
    params = tuple(params)
    for p in params:
        if not isinstance(p, str) or not _NAME_RE.match(p) or p == "i":
            raise ValueError(f"invalid parameter name {p!r}")
    if len(set(params)) != len(params):
        raise ValueError(f"duplicate parameter names in {params}")
    return params


def _union(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    if a == b:
        return a
    seen = set(a)
    return a + tuple(p for p in b if p not in seen)


class CoeffExpr:
    """Immutable reduced rational function over ``Q(i)``.

    Instances are normally produced by :func:`parse_expr`,
    :meth:`const` and :meth:`param`.  Binary operations between expressions
    with different parameter tuples work over the ordered union.
    """

    __slots__ = ("_num", "_den", "_params", "_poly")

    def __init__(self, num, den, params: tuple[str, ...], _reduced: bool = False):
        # num, den: PolyElements of _ring(params)
        if not _reduced:
            num, den = _normalize(num, den)
        self._num = num
        self._den = den
        self._params = params
        self._poly = den.is_ground

    # constructors

    @classmethod
    def const(cls, value, params: Sequence[str] = ()) -> CoeffExpr:
        params = _check_params(params)
        R = _ring(params)
        return cls(R.ground_new(gauss(value)), R.one, params, _reduced=True)

    @classmethod
    def zero(cls, params: Sequence[str] = ()) -> CoeffExpr:
        params = _check_params(params)
        R = _ring(params)
        return cls(R.zero, R.one, params, _reduced=True)

    @classmethod
    def one(cls, params: Sequence[str] = ()) -> CoeffExpr:
        params = _check_params(params)
        R = _ring(params)
        return cls(R.one, R.one, params, _reduced=True)

    @classmethod
    def param(cls, name: str, params: Sequence[str] | None = None) -> CoeffExpr:
        params = _check_params((name,) if params is None else params)
        if name not in params:
            raise UndeclaredParameter(name, params)
        R = _ring(params)
        return cls(R.gens[params.index(name)], R.one, params, _reduced=True)

    # accessors

    @property
    def params(self) -> tuple[str, ...]:
        return self._params

    @property
    def numerator(self) -> CoeffExpr:
        R = self._num.ring
        return CoeffExpr(self._num, R.one, self._params, _reduced=True)

    @property
    def denominator(self) -> CoeffExpr:
        R = self._num.ring
        return CoeffExpr(self._den, R.one, self._params, _reduced=True)

    def free_params(self) -> tuple[str, ...]:
        """Parameters that actually occur, in declared order."""
        degs = [max(a, b) for a, b in zip(self._num.degrees(), self._den.degrees())]
        return tuple(p for p, d in zip(self._params, degs) if d > 0)

    def is_constant(self) -> bool:
        return self._poly and self._num.is_ground

    def is_polynomial(self) -> bool:
        return self._poly

    def value(self) -> GaussRational:
        """The Gaussian rational value of a parameter-free expression."""
        if not self.is_constant():
            raise ResidualParameters(f"{self} depends on {list(self.free_params())}")
        return self._num.LC if self._num else QQ_I(0, 0)

    def with_params(self, params: Sequence[str]) -> CoeffExpr:
        """Re-embed into a larger (or reordered) parameter tuple."""
        params = _check_params(params)
        if params == self._params:
            return self
        missing = [p for p in self.free_params() if p not in params]
        if missing:
            raise UndeclaredParameter(missing[0], params)
        R = _ring(params)
        num, den = self._num.set_ring(R), self._den.set_ring(R)
        # appending parameters keeps the lex leading term; reordering may not
        reduced = den.is_ground or params[: len(self._params)] == self._params
        return CoeffExpr(num, den, params, _reduced=reduced)

    def subs(self, assignment: Mapping[str, object]) -> CoeffExpr:
        """Substitute values for some parameters (params list unchanged)."""
        num, den = self._num, self._den
        gens = num.ring.gens
        for name, val in assignment.items():
            if name not in self._params:
                raise UndeclaredParameter(name, self._params)
            g = gens[self._params.index(name)]
            v = gauss(val)
            num, den = num.subs(g, v), den.subs(g, v)
        if not den:
            raise PoleAtPoint(f"{self} has a pole at {dict(assignment)}")
        return CoeffExpr(num, den, self._params)

    def conjugate(self) -> CoeffExpr:
        """Complex-conjugate every coefficient (parameters treated as real)."""
        R = self._num.ring
        num = R({m: QQ_I(c.x, -c.y) for m, c in self._num.items()})
        den = R({m: QQ_I(c.x, -c.y) for m, c in self._den.items()})
        return CoeffExpr(num, den, self._params)

    # arithmetic

    def _coerce(self, other) -> tuple[CoeffExpr, CoeffExpr] | None:
        if isinstance(other, CoeffExpr):
            if other._params == self._params:
                return self, other
            params = _union(self._params, other._params)
            return self.with_params(params), other.with_params(params)
        try:
            g = gauss(other)
        except TypeError:
            return None
        R = self._num.ring
        return self, CoeffExpr(R.ground_new(g), R.one, self._params, _reduced=True)

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._poly and b._poly:
            return CoeffExpr(a._num + b._num, a._den, a._params, _reduced=True)
        if a._den == b._den:
            return CoeffExpr(a._num + b._num, a._den, a._params)
        return CoeffExpr(a._num * b._den + b._num * a._den, a._den * b._den, a._params)

    __radd__ = __add__

    def __neg__(self):
        return CoeffExpr(-self._num, self._den, self._params, _reduced=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a + (-b)

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b + (-a)

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._poly and b._poly:
            return CoeffExpr(a._num * b._num, a._den, a._params, _reduced=True)
        return CoeffExpr(a._num * b._num, a._den * b._den, a._params)

    __rmul__ = __mul__

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if not b._num:
            raise DivisionByZeroPolynomial(f"division of {a} by zero")
        return CoeffExpr(a._num * b._den, a._den * b._num, a._params)

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b / a

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent >= 0:
            return CoeffExpr(self._num**exponent, self._den**exponent, self._params, _reduced=True)
        if not self._num:
            raise DivisionByZeroPolynomial("zero raised to a negative power")
        e = -exponent
        return CoeffExpr(self._den**e, self._num**e, self._params)

    def __bool__(self) -> bool:
        return bool(self._num)

    def __eq__(self, other) -> bool:
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._den == b._den:
            return a._num == b._num
        return a._num * b._den == b._num * a._den

    def __hash__(self) -> int:
        if self._poly:
            return hash(_named_terms(self._num, self._params))
        # invariant of the value alone: total degrees of the reduced parts
        return hash((_total_degree(self._num), _total_degree(self._den)))

    def __str__(self) -> str:
        num = _format_poly(self._num, self._params)
        if self._poly:
            return num
        return f"{_wrap(num)}/{_wrap(_format_poly(self._den, self._params))}"

    def __repr__(self) -> str:
        return f"CoeffExpr({str(self)!r}, params={list(self._params)!r})"

    def __complex__(self) -> complex:
        return gauss_to_complex(self.value())


def _total_degree(poly) -> int:
    return max((sum(m) for m in poly.monoms()), default=-1) if poly else -1


def _wrap(text: str) -> str:
    return f"({text})" if any(c in text for c in " +-*/") else text


def _named_terms(poly, params):
    return frozenset(
        (tuple((n, e) for n, e in zip(params, m) if e), c) for m, c in poly.items()
    )


def _normalize(num, den):
    if not den:
        raise DivisionByZeroPolynomial("denominator is the zero polynomial")
    R = num.ring
    if not num:
        return R.zero, R.one
    if den.is_ground:
        lc = den.LC
        return (num if lc == QQ_I.one else num.quo_ground(lc)), R.one
    num, den = num.cancel(den)
    lc = den.LC
    if lc != QQ_I.one:
        num, den = num.quo_ground(lc), den.quo_ground(lc)
    if den.is_ground:
        return num, R.one
    return num, den


def _format_monomial(exps, params) -> str:
    parts = []
    for name, e in zip(params, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_term(coeff, mono: str) -> str:
    if not mono:
        return format_gauss(coeff)
    if coeff == QQ_I.one:
        return mono
    if coeff == -QQ_I.one:
        return "-" + mono
    return f"{format_gauss(coeff)}*{mono}"


def _format_poly(poly, params) -> str:
    if not poly:
        return "0"
    out = ""
    for exps, coeff in poly.terms():
        term = _format_term(coeff, _format_monomial(exps, params))
        if not out:
            out = term
        elif term.startswith("-"):
            out += " - " + term[1:]
        else:
            out += " + " + term
    return out


def as_coeff(value, params: Sequence[str] = ()) -> CoeffExpr:
    """Coerce ints, Gaussian rationals, strings or CoeffExprs into ``params``."""
    if isinstance(value, CoeffExpr):
        return value.with_params(_union(tuple(params), value.params)) if params else value
    if isinstance(value, str):
        return parse_expr(value, params)
    return CoeffExpr.const(value, params)


# --- parser ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # trailing whitespace
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("INT", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("NAME", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", text, start)
            tokens.append(("OP", ch, start))
        pos = m.end()
    tokens.append(("END", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, params: tuple[str, ...]):
        self.text = text
        self.params = params
        self.tokens = _tokenize(text)
        self.i = 0
        self.R = _ring(params)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ExpressionSyntaxError(msg, self.text, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] != "OP":
            raise self.error(f"expected {value!r}", tok)

    def parse(self) -> CoeffExpr:
        if self.peek()[0] == "END":
            raise self.error("empty expression")
        out = self.expr()
        if self.peek()[0] != "END":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return out

    def expr(self):
        out = self.term()
        while self.peek()[0] == "OP" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while self.peek()[0] == "OP" and self.peek()[1] in "*/":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                out = out * rhs
            else:
                if not rhs:
                    raise DivisionByZeroPolynomial(
                        f"division by an identically zero expression at position {tok[2]}"
                    )
                out = out / rhs
        return out

    def unary(self):
        tok = self.peek()
        if tok[0] == "OP" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "OP" and self.peek()[1] == "^":
            tok = self.take()
            e = self.exponent()
            if e < 0 and not base:
                raise DivisionByZeroPolynomial(f"zero to a negative power at position {tok[2]}")
            base = base**e
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[:2] == ("OP", "("):
            self.take()
            paren = True
        sign = 1
        if self.peek()[0] == "OP" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "INT":
            raise self.error("exponent must be an integer literal", tok)
        if paren:
            self.expect(")")
        return sign * int(tok[1])

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "INT":
            return CoeffExpr(self.R.ground_new(QQ_I(int(val), 0)), self.R.one, self.params, _reduced=True)
        if kind == "NAME":
            if val == "i":
                return CoeffExpr(self.R.ground_new(QQ_I(0, 1)), self.R.one, self.params, _reduced=True)
            if val not in self.params:
                raise UndeclaredParameter(val, self.params)
            return CoeffExpr(self.R.gens[self.params.index(val)], self.R.one, self.params, _reduced=True)
        if kind == "OP" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "END":
            raise self.error("unexpected end of expression", tok)
        raise self.error(f"unexpected token {val!r}", tok)


def parse_expr(text: str, params: Sequence[str] = ()) -> CoeffExpr:
    """Parse ``text`` into a reduced :class:`CoeffExpr` over ``params``.

    >>> str(parse_expr("(lambda^2 - 1)/(lambda - 1)", ["lambda"]))
    'lambda + 1'
    """
    return _Parser(text, _check_params(params)).parse()


# --- evaluation and limits -----------------------------------------------------


def eval_at(x: CoeffExpr, assignment: Mapping[str, object]) -> GaussRational:
    """Exact value of ``x`` at ``assignment`` (substituted into the reduced form)."""
    missing = [p for p in x.free_params() if p not in assignment]
    if missing:
        raise UnassignedParameter(missing)
    R = x._num.ring
    point = []
    for name, gen in zip(x.params, R.gens):
        point.append((gen, gauss(assignment[name]) if name in assignment else QQ_I(0, 0)))
    if not point:
        return x.value()
    den = x._den.evaluate(point)
    if den == QQ_I(0, 0):
        raise PoleAtPoint(f"{x} has a pole at {dict(assignment)}")
    return x._num.evaluate(point) / den


def partial_limit(x: CoeffExpr, param: str, value) -> CoeffExpr:
    """Limit ``param -> value`` with every other parameter treated as generic.

    Raises :class:`DoesNotExist` when the reduced denominator vanishes
    identically at ``param = value``.
    """
    if param not in x.params:
        raise UndeclaredParameter(param, x.params)
    v = gauss(value)
    gen = x._num.ring.gens[x.params.index(param)]
    den = x._den.subs(gen, v)
    if not den:
        raise DoesNotExist(f"{x} has a pole at {param} = {format_gauss(v)}")
    return CoeffExpr(x._num.subs(gen, v), den, x.params)


def limit_at(x: CoeffExpr, param: str, value) -> GaussRational:
    """Limit of a one-parameter expression as ``param -> value``."""
    if param not in x.params:
        raise UndeclaredParameter(param, x.params)
    others = [p for p in x.free_params() if p != param]
    if others:
        raise ResidualParameters(f"{x} still depends on {others}")
    return partial_limit(x, param, value).value()
