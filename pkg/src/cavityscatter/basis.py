"""Gauss-Lobatto-Legendre spectral basis on the reference interval [-1, 1].

Provides GLL nodes/weights, the 1D collocation differentiation matrix and
Lagrange evaluation helpers used by the hexahedral spectral elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def legendre_and_derivative(n, x):
    """Evaluate P_n(x) and P_n'(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    # derivative from the standard identity (1-x^2) P_n' = n (P_{n-1} - x P_n)
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = n * (p0 - x * p1) / (1.0 - x * x)
    endpoint = np.abs(np.abs(x) - 1.0) < 1e-13
    if np.any(endpoint):
        dval = n * (n + 1) / 2.0
        dp = np.where(endpoint, np.sign(x) ** (n + 1) * dval, dp)
    return p1, dp


def gll_nodes_weights(degree):
    """Nodes and weights of the (degree+1)-point Gauss-Lobatto-Legendre rule.

    Interior nodes are the roots of P'_N found by Newton iteration from
    Chebyshev-Gauss-Lobatto starting guesses.
    """
    n = int(degree)
    if n < 1:
        raise ValueError("GLL rule needs degree >= 1")
    x = np.cos(np.pi * np.arange(n + 1) / n)[::-1].copy()
    for _ in range(100):
        p, dp = legendre_and_derivative(n, x)
        # f = (1-x^2) P_N'(x) has the GLL nodes as roots; Newton on interior
        f = (1.0 - x * x) * dp
        df = -2.0 * x * dp - n * (n + 1) * p
        dx = np.where(np.abs(df) > 0, f / df, 0.0)
        dx[0] = dx[-1] = 0.0
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    x[0], x[-1] = -1.0, 1.0
    p, _ = legendre_and_derivative(n, x)
    w = 2.0 / (n * (n + 1) * p * p)
    return x, w


def differentiation_matrix(nodes):
    """Collocation derivative matrix D with (D f)_i = f'(x_i) for f in P_N."""
    x = np.asarray(nodes, dtype=float)
    n = len(x) - 1
    p, _ = legendre_and_derivative(n, x)
    d = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1):
            if i != j:
                d[i, j] = (p[i] / p[j]) / (x[i] - x[j])
    d[0, 0] = -n * (n + 1) / 4.0
    d[n, n] = n * (n + 1) / 4.0
    return d


def lagrange_values(nodes, xi):
    """Values of the Lagrange cardinal polynomials of `nodes` at points `xi`.

    Returns an array of shape (len(xi), len(nodes)).
    """
    x = np.asarray(nodes, dtype=float)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    m = len(x)
    out = np.ones((len(xi), m))
    for j in range(m):
        for k in range(m):
            if k != j:
                out[:, j] *= (xi - x[k]) / (x[j] - x[k])
    return out


def lagrange_derivatives(nodes, xi):
    """Derivatives of the Lagrange cardinal polynomials at points `xi`."""
    x = np.asarray(nodes, dtype=float)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    m = len(x)
    out = np.zeros((len(xi), m))
    for j in range(m):
        for i in range(m):
            if i == j:
                continue
            term = np.ones(len(xi)) / (x[j] - x[i])
            for k in range(m):
                if k != j and k != i:
                    term *= (xi - x[k]) / (x[j] - x[k])
            out[:, j] += term
    return out


@dataclass(frozen=True)
class SpectralBasis:
    """1D GLL basis of a given polynomial degree.

    Attributes
    ----------
    degree : polynomial degree N
    nodes, weights : GLL points and quadrature weights on [-1, 1]
    diff : (N+1)x(N+1) differentiation matrix
    """

    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    diff: np.ndarray = field(repr=False)

    @classmethod
    def create(cls, degree):
        x, w = gll_nodes_weights(degree)
        return cls(degree=int(degree), nodes=x, weights=w,
                   diff=differentiation_matrix(x))

    @property
    def n(self):
        """Number of 1D nodes, degree + 1."""
        return self.degree + 1


_cache: dict[int, SpectralBasis] = {}


def get_basis(degree) -> SpectralBasis:
    """Cached SpectralBasis factory."""
    if degree not in _cache:
        _cache[degree] = SpectralBasis.create(degree)
    return _cache[degree]
