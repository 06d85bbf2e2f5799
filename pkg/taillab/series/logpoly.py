"""Exact rational-log expansions of F_j used as an oracle for the numeric recurrence.

Near tau = 0 every F_j is a power series with rational coefficients. For
large tau, F_j = tau^{j_m} sum_n (ln tau)^n W_n(1/tau) with n <= j - m + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
import sympy

from taillab.series.recurrence import j_index

TAU = sympy.Symbol("tau", positive=True)

SMALL = "|tau| < 2"
LARGE = "|tau| > 2"

Term = Tuple[sympy.Rational, int, sympy.Expr]


@dataclass(frozen=True)
class LogPolySeries:
    """sum c tau^a (ln tau)^b, truncated."""

    terms: Tuple[Term, ...]
    valid_region: str
    j: int
    m: int

    def coefficient(self, power: Union[int, sympy.Rational], log_power: int = 0) -> sympy.Expr:
        power = sympy.Rational(power)
        for a, b, c in self.terms:
            if a == power and b == log_power:
                return c
        return sympy.Integer(0)

    @property
    def max_log_power(self) -> int:
        return max((b for _, b, _ in self.terms), default=0)

    @property
    def leading_power(self) -> sympy.Rational:
        """Lowest power near 0, highest power at infinity."""
        powers = [a for a, _, _ in self.terms]
        return min(powers) if self.valid_region == SMALL else max(powers)

    def check_structure(self) -> None:
        limit = self.j - self.m + 1
        if self.max_log_power > limit:
            raise ValueError(f"F_{self.j} 的对数幂 {self.max_log_power} 超过 j-m+1={limit}")
        if self.valid_region == LARGE and self.leading_power > j_index(self.m, self.j):
            raise ValueError(f"F_{self.j} 的主导幂 {self.leading_power} 超过 j_m={j_index(self.m, self.j)}")

    def as_expr(self) -> sympy.Expr:
        return sympy.Add(*[c * TAU**a * sympy.log(TAU) ** b for a, b, c in self.terms])

    def __call__(self, tau: Union[complex, np.ndarray]) -> np.ndarray:
        tau = np.asarray(tau, dtype=complex)
        log_tau = np.log(tau)
        out = np.zeros(tau.shape, dtype=complex)
        for a, b, c in self.terms:
            out = out + complex(sympy.N(c, 30)) * tau ** float(a) * log_tau**b
        return out


def _from_dict(coeffs: Dict[Tuple[sympy.Rational, int], sympy.Expr], region: str, j: int, m: int) -> LogPolySeries:
    terms = tuple(
        (sympy.Rational(a), int(b), c) for (a, b), c in sorted(coeffs.items(), key=lambda kv: (kv[0][0], kv[0][1])) if c != 0
    )
    return LogPolySeries(terms, region, j, m)


def small_tau_series(m: int, j: int, order: int = 10, v1: Union[int, sympy.Rational] = 1) -> LogPolySeries:
    """Lowest `order` Taylor coefficients of F_j, exact."""
    if m < 3:
        raise ValueError(f"m 必须 >= 3，当前 {m}")
    if j < m - 1:
        raise ValueError(f"j 必须 >= m-1={m - 1}")
    v = sympy.nsimplify(v1)
    coeffs: Dict[int, sympy.Expr] = {m - 1: v / sympy.factorial(m - 1)}
    for _ in range(j - m + 1):
        low = min(coeffs)
        quotient: Dict[int, sympy.Expr] = {}
        # F/tau times 1/(tau + 2) = sum (-1)^n tau^n / 2^(n+1)
        for k, a in coeffs.items():
            for n in range(order):
                p = k - 1 + n
                if p >= low - 1 + order:
                    break
                quotient[p] = quotient.get(p, 0) + a * sympy.Rational((-1) ** n, 2 ** (n + 1))
        coeffs = {
            p + m: v * c * sympy.factorial(p) / sympy.factorial(p + m) for p, c in quotient.items() if c != 0
        }
    low = min(coeffs)
    return _from_dict({(k, 0): c for k, c in coeffs.items() if k < low + order}, SMALL, j, m)


def closed_form_next(m: int, v1: Union[int, sympy.Rational] = 1) -> sympy.Expr:
    """F_m = v P^m [F_{m-1} / (tau (tau + 2))] by symbolic integration."""
    s = sympy.Symbol("s", positive=True)
    v = sympy.nsimplify(v1)
    g = v * v * TAU ** (m - 2) / (sympy.factorial(m - 1) * (TAU + 2))
    for _ in range(m):
        g = sympy.integrate(g.subs(TAU, s), (s, 0, TAU))
    return sympy.expand(g)


def taylor_coefficients(expr: sympy.Expr, order: int) -> Dict[int, sympy.Expr]:
    expansion = sympy.series(expr, TAU, 0, order).removeO()
    expansion = sympy.expand(expansion)
    return {k: sympy.nsimplify(sympy.simplify(expansion.coeff(TAU, k))) for k in range(order)}


def _expand_log(arg: sympy.Expr, order: int) -> sympy.Expr:
    poly = sympy.Poly(arg, TAU)
    if poly.degree() != 1:
        return sympy.log(arg)
    a, b = poly.all_coeffs()
    if b == 0:
        return sympy.log(a) + sympy.log(TAU)
    u = b / (a * TAU)
    return sympy.log(a) + sympy.log(TAU) + sympy.Add(*[(-1) ** (k + 1) * u**k / k for k in range(1, order + 1)])


def _split_term(term: sympy.Expr) -> Tuple[sympy.Rational, int, sympy.Expr]:
    coeff, rest = term.as_independent(TAU, as_Add=False)
    power, log_power = sympy.Integer(0), 0
    for factor in sympy.Mul.make_args(rest):
        if factor == 1:
            continue
        base, exp = factor.as_base_exp()
        if base == TAU:
            power += exp
        elif base == sympy.log(TAU):
            log_power += int(exp)
        else:
            raise ValueError(f"无法解析的因子 {factor}")
    return sympy.Rational(power), log_power, coeff


def parse_terms(expr: sympy.Expr) -> Dict[Tuple[sympy.Rational, int], sympy.Expr]:
    collected: Dict[Tuple[sympy.Rational, int], sympy.Expr] = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        a, b, c = _split_term(term)
        collected[(a, b)] = collected.get((a, b), 0) + c
    return {key: sympy.simplify(c) for key, c in collected.items()}


def large_tau_series(expr: sympy.Expr, j: int, m: int, order: int = 6) -> LogPolySeries:
    """Rewrite log(a tau + b) = log a + log tau + log(1 + b/(a tau)) and keep powers >= j_m - order."""
    expanded = expr.replace(
        lambda e: isinstance(e, sympy.log) and e.has(TAU),
        lambda e: _expand_log(e.args[0], order),
    )
    floor = j_index(m, j) - order
    coeffs = {key: c for key, c in parse_terms(expanded).items() if key[0] >= floor}
    series = _from_dict(coeffs, LARGE, j, m)
    series.check_structure()
    return series
