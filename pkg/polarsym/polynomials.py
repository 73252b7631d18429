"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as ``{exponent tuple: Fraction}`` over an ordered tuple of
variable names. Zero coefficients are never stored.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Iterator, Mapping, Sequence

from polarsym.errors import VariableMismatchError

Exponent = tuple[int, ...]


def _as_fraction(c: Any) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str, Rational)):
        return Fraction(c)
    return Fraction(c).limit_denominator(10**12)


class MultiPoly:
    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Any] | None = None):
        self.variables: tuple[str, ...] = tuple(variables)
        n = len(self.variables)
        clean: dict[Exponent, Fraction] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"exponent {exp} does not fit variables {self.variables}")
            c = _as_fraction(coef)
            if c != 0:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if clean[exp] == 0:
                    del clean[exp]
        self._terms = clean

    @classmethod
    def constant(cls, value: Any, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        exp = tuple(1 if v == name else 0 for v in variables)
        if sum(exp) != 1:
            raise ValueError(f"{name!r} is not one of {variables}")
        return cls(variables, {exp: 1})

    @classmethod
    def gens(cls, variables: Sequence[str]) -> list["MultiPoly"]:
        return [cls.variable(v, variables) for v in variables]

    @classmethod
    def linear(cls, coefficients: Sequence[Any], variables: Sequence[str]) -> "MultiPoly":
        n = len(variables)
        terms = {}
        for i, c in enumerate(coefficients):
            exp = [0] * n
            exp[i] = 1
            terms[tuple(exp)] = c
        return cls(variables, terms)

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def monomials(self) -> list[Exponent]:
        return sorted(self._terms, key=lambda e: (-sum(e), tuple(-x for x in e)))

    def homogeneous_part(self, degree: int) -> "MultiPoly":
        return MultiPoly(self.variables, {e: c for e, c in self._terms.items() if sum(e) == degree})

    def _check(self, other: "MultiPoly") -> None:
        if self.variables != other.variables:
            raise VariableMismatchError(self.variables, other.variables)

    def _lift(self, other: Any) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(other, self.variables)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(other, self.variables)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self._terms.items())))

    def __add__(self, other: Any) -> "MultiPoly":
        other = self._lift(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> "MultiPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "MultiPoly":
        return self._lift(other) - self

    def __mul__(self, other: Any) -> "MultiPoly":
        other = self._lift(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Any) -> "MultiPoly":
        s = _as_fraction(scalar)
        return MultiPoly(self.variables, {e: c / s for e, c in self._terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def eval(self, point: Sequence[Any]) -> Any:
        """Evaluate at a point; exact when every coordinate is rational."""
        if len(point) != len(self.variables):
            raise VariableMismatchError(self.variables, tuple(f"#{i}" for i in range(len(point))))
        exact = all(isinstance(p, (int, Fraction)) for p in point)
        total: Any = Fraction(0) if exact else 0.0
        for exp, coef in self._terms.items():
            term: Any = coef if exact else float(coef)
            for p, e in zip(point, exp):
                if e:
                    term = term * p**e
            total = total + term
        return total

    __call__ = eval

    def diff(self, name: str) -> "MultiPoly":
        i = self.variables.index(name)
        out = {}
        for exp, coef in self._terms.items():
            if exp[i]:
                e = list(exp)
                e[i] -= 1
                out[tuple(e)] = coef * exp[i]
        return MultiPoly(self.variables, out)

    def compose(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``images[i]`` for the i-th variable."""
        if len(images) != len(self.variables):
            raise VariableMismatchError(self.variables, tuple(f"#{i}" for i in range(len(images))))
        target = images[0].variables if images else ()
        for img in images:
            if img.variables != target:
                raise VariableMismatchError(target, img.variables)
        result = MultiPoly(target)
        powers: dict[tuple[int, int], MultiPoly] = {}
        for exp, coef in self._terms.items():
            term = MultiPoly.constant(coef, target)
            for i, e in enumerate(exp):
                if e:
                    if (i, e) not in powers:
                        powers[(i, e)] = images[i] ** e
                    term = term * powers[(i, e)]
            result = result + term
        return result

    def linear_substitute(self, matrix: Sequence[Sequence[Any]]) -> "MultiPoly":
        """p ∘ M, where the new i-th variable is Σ_j M[i][j] · var_j."""
        images = [MultiPoly.linear(row, self.variables) for row in matrix]
        return self.compose(images)

    def embed(self, variables: Sequence[str]) -> "MultiPoly":
        """Same polynomial viewed over a superset of variables."""
        variables = tuple(variables)
        missing = [v for v in self.variables if v not in variables]
        if missing:
            raise VariableMismatchError(self.variables, variables)
        index = [variables.index(v) for v in self.variables]
        out = {}
        for exp, coef in self._terms.items():
            e = [0] * len(variables)
            for j, k in zip(index, exp):
                e[j] = k
            out[tuple(e)] = coef
        return MultiPoly(variables, out)

    def to_text(self) -> str:
        if not self._terms:
            return "0:0" if not self.variables else ",".join("0" * len(self.variables)) + ":0"
        return " ".join(f"{','.join(map(str, e))}:{self._terms[e]}" for e in self.monomials())

    @classmethod
    def from_text(cls, text: str, variables: Sequence[str]) -> "MultiPoly":
        terms: dict[Exponent, Fraction] = {}
        for token in text.split():
            exp_part, sep, coef_part = token.partition(":")
            if not sep:
                raise ValueError(f"malformed term {token!r}; expected e1,e2,...:coef")
            exp = tuple(int(x) for x in exp_part.split(","))
            terms[exp] = terms.get(exp, Fraction(0)) + Fraction(coef_part)
        return cls(variables, terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp in self.monomials():
            c = self._terms[exp]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exp) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables}, {str(self)!r})"


def exponents_of_degree(nvars: int, degree: int) -> Iterator[Exponent]:
    """All exponent tuples of exact total degree, in graded-lex order."""
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in combo:
            exp[i] += 1
        yield tuple(exp)


def monomial(exp: Exponent, variables: Sequence[str]) -> MultiPoly:
    return MultiPoly(variables, {tuple(exp): 1})


def products_of_degree(polys: Sequence[MultiPoly], degree: int) -> Iterable[tuple[Exponent, MultiPoly]]:
    """Every product of the given polynomials whose weighted degree is ``degree``.

    The weight of each factor is its polynomial degree; zero-degree factors
    are skipped. Yields (multi-index over ``polys``, product).
    """
    weights = [p.degree for p in polys]
    usable = [i for i, w in enumerate(weights) if w > 0 and not polys[i].is_zero()]

    def rec(pos: int, remaining: int, exps: list[int]) -> Iterator[list[int]]:
        if remaining == 0:
            yield list(exps)
            return
        if pos == len(usable):
            return
        i = usable[pos]
        k = 0
        while k * weights[i] <= remaining:
            exps[i] = k
            yield from rec(pos + 1, remaining - k * weights[i], exps)
            k += 1
        exps[i] = 0

    if not polys:
        return
    variables = polys[0].variables
    for exps in rec(0, degree, [0] * len(polys)):
        product = MultiPoly.constant(1, variables)
        for p, k in zip(polys, exps):
            if k:
                product = product * p**k
        yield tuple(exps), product


def poly_poisson_bracket(p: MultiPoly, q: MultiPoly, positions: Sequence[str], momenta: Sequence[str]) -> MultiPoly:
    """{p, q} = Σ ∂p/∂x_i ∂q/∂ξ_i − ∂p/∂ξ_i ∂q/∂x_i."""
    p._check(q)
    result = MultiPoly(p.variables)
    for x, xi in zip(positions, momenta):
        result = result + p.diff(x) * q.diff(xi) - p.diff(xi) * q.diff(x)
    return result
