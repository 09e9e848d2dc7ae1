"""Exact multivariate rational functions and power-series extraction.

Polynomials are sparse ``flint.fmpq_mpoly`` values in one fixed set of
variables (``VARIABLES``); :class:`RationalFunction` keeps a reduced
numerator/denominator pair on top of them.  Coefficients cross the public
boundary as :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import flint

VARIABLES = ("z", "x", "t", "u", "v", "y") + tuple(f"x{i}" for i in range(1, 13))
CONTEXT = flint.fmpq_mpoly_ctx.get(VARIABLES, "lex")
_GENS = CONTEXT.gens()
_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_ZERO_MONOM = (0,) * len(VARIABLES)

MultiPoly = flint.fmpq_mpoly


class SingularAtZero(ArithmeticError):
    """The denominator cannot be inverted as a power series in the main variable."""


class SingularMatrix(ArithmeticError):
    """A linear system over rational functions has no unique solution."""


def var_index(name: str) -> int:
    try:
        return _INDEX[name]
    except KeyError:
        raise ValueError(f"unknown variable {name!r}; available: {', '.join(VARIABLES)}") from None


def to_fmpq(value) -> flint.fmpq:
    if isinstance(value, flint.fmpq):
        return value
    value = Fraction(value)
    return flint.fmpq(value.numerator, value.denominator)


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(value.p), int(value.q))


def poly(value) -> MultiPoly:
    """Coerce an int, Fraction or polynomial into a polynomial."""
    if isinstance(value, MultiPoly):
        return value
    return CONTEXT.constant(to_fmpq(value))


def poly_var(name: str) -> MultiPoly:
    return _GENS[var_index(name)]


def poly_constant(p: MultiPoly) -> Fraction:
    """Value of a polynomial without variables; raises if variables remain."""
    if p.is_constant():
        return to_fraction(p[_ZERO_MONOM])
    raise ValueError(f"polynomial {p} is not constant")


def poly_terms(p: MultiPoly) -> dict[tuple[tuple[str, int], ...], Fraction]:
    """Sparse view ``{((var, exp), ...): coefficient}`` with zero exponents omitted."""
    out = {}
    for monom, coeff in p.to_dict().items():
        key = tuple((VARIABLES[i], e) for i, e in enumerate(monom) if e)
        out[key] = to_fraction(coeff)
    return out


def poly_variables(p: MultiPoly) -> set[str]:
    return {VARIABLES[i] for i, d in enumerate(p.degrees()) if d > 0}


def _split_by(p: MultiPoly, k: int) -> dict[int, MultiPoly]:
    """Group ``p`` by powers of variable ``k``: ``p = sum(parts[j] * var**j)``."""
    groups: dict[int, dict] = {}
    for monom, coeff in p.to_dict().items():
        j = monom[k]
        rest = monom[:k] + (0,) + monom[k + 1:]
        groups.setdefault(j, {})[rest] = coeff
    return {j: CONTEXT.from_dict(terms) for j, terms in groups.items()}


class RationalFunction:
    """Quotient of two polynomials, kept reduced.

    The denominator is scaled so that its constant term is 1 when that term
    is nonzero (otherwise its leading coefficient is 1), which makes equal
    functions share one representation.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, *, reduce: bool = True):
        num, den = poly(num), poly(den)
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        if num.is_zero():
            den = CONTEXT.constant(1)
        elif reduce and not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num, den = num / g, den / g
        c = den[_ZERO_MONOM]
        if c == 0:
            c = den.leading_coefficient()
        if c != 1:
            num, den = num / c, den / c
        self.num = num
        self.den = den

    @classmethod
    def var(cls, name: str) -> RationalFunction:
        return cls(poly_var(name))

    @classmethod
    def coerce(cls, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            return value
        return cls(poly(value))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        g = self.den.gcd(other.den)
        if g.is_constant():
            return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)
        a, b = self.den / g, other.den / g
        return RationalFunction(self.num * b + other.num * a, a * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return RationalFunction(0)
        # cross-cancel first so the product stays reduced
        n1, d2 = _cancel(self.num, other.den)
        n2, d1 = _cancel(other.num, self.den)
        return RationalFunction(n1 * n2, d1 * d2, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        return RationalFunction(self.den, self.num, reduce=False)

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k, reduce=False)

    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.num == other.num and self.den == other.den:
            return True
        return self.num * other.den == other.num * self.den

    __hash__ = None

    # -- queries -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    @property
    def variables(self) -> set[str]:
        return poly_variables(self.num) | poly_variables(self.den)

    def degree(self, name: str) -> tuple[int, int]:
        """Degrees of numerator and denominator in one variable (``-1`` for zero)."""
        k = var_index(name)
        deg = self.num.degrees()[k] if not self.num.is_zero() else -1
        return deg, self.den.degrees()[k]

    def constant(self) -> Fraction:
        return poly_constant(self.num) / poly_constant(self.den)

    def size(self) -> int:
        return len(self.num) + len(self.den)

    # -- transformations -----------------------------------------------------

    def subs(self, **values) -> RationalFunction:
        out = self
        for name, value in values.items():
            out = rf_substitute(out, name, value)
        return out

    def diff(self, name: str) -> RationalFunction:
        return rf_derivative(self, name)

    def series(self, horizon: int, var: str = "z", truncate: int | None = None) -> SeriesTable:
        return series_coefficients(self, horizon, var=var, truncate=truncate)

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den == 1:
            return f"{self.num}"
        return f"({self.num}) / ({self.den})"


def _cancel(num: MultiPoly, den: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    if den.is_constant() or num.is_constant():
        return num, den
    g = num.gcd(den)
    if g.is_constant():
        return num, den
    return num / g, den / g


def _coerce_or_none(value):
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, (int, Fraction, MultiPoly, flint.fmpq)):
        return RationalFunction(value)
    return None


RF = RationalFunction


def rf_arith(a, b, op: str) -> RationalFunction:
    a, b = RationalFunction.coerce(a), RationalFunction.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero:
            raise ZeroDivisionError("division by the zero function")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def rf_substitute(f, name: str, g) -> RationalFunction:
    """Replace variable ``name`` in ``f`` by ``g`` (number, polynomial or rational function)."""
    f = RationalFunction.coerce(f)
    g = RationalFunction.coerce(g)
    k = var_index(name)
    if name not in f.variables:
        return f
    if g.is_polynomial and g.num.is_constant():
        value = g.num[_ZERO_MONOM] / g.den[_ZERO_MONOM]
        num, den = f.num.subs({name: value}), f.den.subs({name: value})
    elif g.is_polynomial:
        gp = g.num / g.den.leading_coefficient()
        args = list(_GENS)
        args[k] = gp
        num, den = f.num.compose(*args), f.den.compose(*args)
    else:
        # homogenise: f(p/q) = sum c_j p^j q^(top - j) / q^top, numerator and denominator alike
        parts_n, parts_d = _split_by(f.num, k), _split_by(f.den, k)
        top = max(max(parts_n), max(parts_d))
        pows_n = [CONTEXT.constant(1)]
        pows_d = [CONTEXT.constant(1)]
        for _ in range(top):
            pows_n.append(pows_n[-1] * g.num)
            pows_d.append(pows_d[-1] * g.den)
        num = sum((c * pows_n[j] * pows_d[top - j] for j, c in parts_n.items()), CONTEXT.constant(0))
        den = sum((c * pows_n[j] * pows_d[top - j] for j, c in parts_d.items()), CONTEXT.constant(0))
    if den.is_zero():
        raise ZeroDivisionError(f"substituting {name} -> {g} makes the denominator vanish")
    return RationalFunction(num, den)


def rf_derivative(f, name: str) -> RationalFunction:
    f = RationalFunction.coerce(f)
    k = var_index(name)
    dn = f.num.derivative(k)
    if f.den.is_constant():
        return RationalFunction(dn, f.den)
    dd = f.den.derivative(k)
    return RationalFunction(dn * f.den - f.num * dd, f.den ** 2)


def evaluate_at_one(f, names: Sequence[str]) -> RationalFunction:
    return RationalFunction.coerce(f).subs(**{n: 1 for n in names})


# -- power series ------------------------------------------------------------


@dataclass
class SeriesTable:
    """Coefficients ``[var^0] f, ..., [var^N] f`` as polynomials in the other variables."""

    var: str
    horizon: int
    coefficients: list
    truncated: bool = False

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, n: int) -> MultiPoly:
        return self.coefficients[n]

    def constants(self) -> list[Fraction]:
        return [poly_constant(c) for c in self.coefficients]

    def distribution(self, n: int, var: str) -> dict[int, Fraction]:
        """``{i: [var^i z^n]}`` for a coefficient that only involves ``var``."""
        k = var_index(var)
        out: dict[int, Fraction] = {}
        for monom, coeff in self.coefficients[n].to_dict().items():
            if any(e for i, e in enumerate(monom) if i != k):
                raise ValueError(f"coefficient {n} involves variables other than {var}")
            out[int(monom[k])] = to_fraction(coeff)
        return dict(sorted(out.items()))

    def joint(self, n: int, names: Sequence[str]) -> dict[tuple[int, ...], Fraction]:
        idx = [var_index(v) for v in names]
        out = {}
        for monom, coeff in self.coefficients[n].to_dict().items():
            if any(e for i, e in enumerate(monom) if i not in idx):
                raise ValueError(f"coefficient {n} involves variables outside {names}")
            out[tuple(int(monom[i]) for i in idx)] = to_fraction(coeff)
        return out

    def evaluate(self, **values) -> SeriesTable:
        subs = {k: to_fmpq(v) for k, v in values.items()}
        coeffs = [c.subs(subs) if subs else c for c in self.coefficients]
        return SeriesTable(self.var, self.horizon, coeffs, self.truncated)


def _truncate(p: MultiPoly, order: int, skip: int) -> MultiPoly:
    return CONTEXT.from_dict({m: c for m, c in p.to_dict().items() if sum(m) - m[skip] <= order})


def series_coefficients(f, horizon: int, var: str = "z", truncate: int | None = None) -> SeriesTable:
    """Expand ``f`` in powers of ``var`` up to ``var**horizon``.

    Uses the linear recurrence given by the denominator:
    ``q0 c_n = p_n - sum_k q_k c_{n-k}``.  The ``var``-free part ``q0`` of the
    denominator must be a nonzero constant; otherwise pass ``truncate`` to
    expand ``1/q0`` in the remaining variables up to that total degree (the
    table is then flagged ``truncated``).
    """
    f = RationalFunction.coerce(f)
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    k = var_index(var)
    num_parts = _split_by(f.num, k)
    den_parts = _split_by(f.den, k)
    q0 = den_parts.get(0)
    if q0 is None or q0.is_zero():
        raise SingularAtZero(f"denominator of {f} vanishes at {var} = 0")
    truncated = False
    if q0.is_constant():
        inv_q0 = CONTEXT.constant(1 / q0[_ZERO_MONOM])
    else:
        c0 = q0[_ZERO_MONOM]
        if truncate is None or c0 == 0:
            raise SingularAtZero(
                f"constant part {q0} of the denominator is not invertible; "
                "pass a truncation order to expand it"
            )
        # 1/q0 = (1/c0) * sum_j (1 - q0/c0)^j, truncated
        h = 1 - q0 / c0
        inv_q0, power = CONTEXT.constant(1), CONTEXT.constant(1)
        for _ in range(truncate):
            power = _truncate(power * h, truncate, k)
            if power.is_zero():
                break
            inv_q0 += power
        inv_q0 = inv_q0 / c0
        truncated = True

    q_terms = sorted((j, q) for j, q in den_parts.items() if j > 0)
    all_constant = (
        q0.is_constant()
        and all(q.is_constant() for _, q in q_terms)
        and all(p.is_constant() for p in num_parts.values())
    )
    if all_constant:
        coeffs = _scalar_recurrence(num_parts, q_terms, q0[_ZERO_MONOM], horizon)
        return SeriesTable(var, horizon, [CONTEXT.constant(c) for c in coeffs], False)

    zero = CONTEXT.constant(0)
    coeffs: list[MultiPoly] = []
    for n in range(horizon + 1):
        acc = num_parts.get(n, zero)
        for j, q in q_terms:
            if j > n:
                break
            acc = acc - q * coeffs[n - j]
        c = acc * inv_q0
        if truncated:
            c = _truncate(c, truncate, k)
        coeffs.append(c)
    return SeriesTable(var, horizon, coeffs, truncated)


def _scalar_recurrence(num_parts, q_terms, q0, horizon):
    p = [flint.fmpq(0)] * (horizon + 1)
    for j, c in num_parts.items():
        if j <= horizon:
            p[j] = c[_ZERO_MONOM]
    q = [(j, c[_ZERO_MONOM]) for j, c in q_terms]
    inv = 1 / q0
    out = []
    for n in range(horizon + 1):
        acc = p[n]
        for j, c in q:
            if j > n:
                break
            acc -= c * out[n - j]
        out.append(acc * inv)
    return out


def series_values(f, horizon: int, var: str = "z") -> list[Fraction]:
    """Series of a function of ``var`` alone, as Fractions."""
    return series_coefficients(f, horizon, var).constants()


# -- linear algebra ----------------------------------------------------------

Matrix = list  # list of rows of RationalFunction


def identity(n: int) -> list[list[RationalFunction]]:
    return [[RationalFunction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = RationalFunction(0)
            for k in range(inner):
                if not a[i][k].is_zero and not b[k][j].is_zero:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def solve_linear(a, b):
    """Solve ``a X = b`` by sparse Gaussian elimination over rational functions.

    ``a`` is square (list of rows), ``b`` a list of rows with any number of
    columns.  Pivots are chosen in column order, preferring the entry with the
    smallest representation.
    """
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("coefficient matrix must be square")
    if len(b) != n:
        raise ValueError("right-hand side has the wrong number of rows")
    rows = []
    for i in range(n):
        row = {j: RationalFunction.coerce(e) for j, e in enumerate(a[i])}
        row = {j: e for j, e in row.items() if not e.is_zero}
        rhs = [RationalFunction.coerce(e) for e in b[i]]
        rows.append((row, rhs))

    remaining = list(range(n))
    order = []
    for col in range(n):
        candidates = [r for r in remaining if col in rows[r][0]]
        if not candidates:
            raise SingularMatrix(f"no pivot in column {col}")
        pivot = min(candidates, key=lambda r: (rows[r][0][col].size(), len(rows[r][0])))
        remaining.remove(pivot)
        order.append(pivot)
        prow, prhs = rows[pivot]
        inv = prow[col].inverse()
        prow = {j: e * inv for j, e in prow.items()}
        prow[col] = RationalFunction(1)
        prhs = [e * inv for e in prhs]
        rows[pivot] = (prow, prhs)
        for r in remaining:
            row, rhs = rows[r]
            factor = row.get(col)
            if factor is None:
                continue
            for j, e in prow.items():
                if j == col:
                    continue
                new = row.get(j, RationalFunction(0)) - factor * e
                if new.is_zero:
                    row.pop(j, None)
                else:
                    row[j] = new
            del row[col]
            rows[r] = (row, [x - factor * y if not y.is_zero else x for x, y in zip(rhs, prhs)])

    solution: list = [None] * n
    for col in reversed(range(n)):
        row, rhs = rows[order[col]]
        vals = list(rhs)
        for j, e in row.items():
            if j != col:
                vals = [v - e * s for v, s in zip(vals, solution[j])]
        solution[col] = vals
    return solution


def rf_matrix_solve(m, b):
    """Return ``(I - m)^{-1} b``."""
    n = len(m)
    a = [[(1 if i == j else 0) - RationalFunction.coerce(m[i][j]) for j in range(n)] for i in range(n)]
    return solve_linear(a, b)


def matrix_inverse(a):
    n = len(a)
    return solve_linear(a, [[RationalFunction(1 if i == j else 0) for j in range(n)] for i in range(n)])


def monomial(coeff, **exponents) -> MultiPoly:
    """``coeff * prod(var**e)`` as a polynomial."""
    monom = [0] * len(VARIABLES)
    for name, e in exponents.items():
        monom[var_index(name)] = e
    return CONTEXT.from_dict({tuple(monom): to_fmpq(coeff)})


def polynomial_from_words(weights: Mapping[int, Fraction], var: str = "z") -> MultiPoly:
    """``sum(weight * var**length)`` for a length -> weight table."""
    k = var_index(var)
    terms = {}
    for length, w in weights.items():
        monom = [0] * len(VARIABLES)
        monom[k] = length
        terms[tuple(monom)] = to_fmpq(w)
    return CONTEXT.from_dict(terms)
