"""Truncated doubled Fock space for one bosonic mode.

Basis states ``|n1, n2>`` with ``0 <= n_a <= n_max`` are indexed n1-major:
``index = n1 * (n_max + 1) + n2``. Operators are dense complex matrices.

Tilde conjugation swaps the two tensor factors and complex-conjugates
matrix elements, so ``a1~ = a2`` and ``(c A)~ = c* A~``. In the number basis
time reversal acts trivially, so the time-reversed states of copy 2 are the
ordinary number states.

The ladder truncation breaks the commutation relations at ``n_a = n_max``;
every residual below is evaluated on components with both indices strictly
below ``n_max``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class FockOperator:
    """Dense operator on the truncated doubled space."""

    __slots__ = ("n_max", "data")

    def __init__(self, data, n_max: int):
        data = np.asarray(data, dtype=complex)
        d = (n_max + 1) ** 2
        if data.shape != (d, d):
            raise ValueError(f"expected shape {(d, d)} for n_max={n_max}, got {data.shape}")
        data.setflags(write=False)
        self.n_max = n_max
        self.data = data

    @classmethod
    def identity(cls, n_max: int) -> "FockOperator":
        return cls(np.eye((n_max + 1) ** 2), n_max)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def dag(self) -> "FockOperator":
        return FockOperator(self.data.conj().T, self.n_max)

    def _coerce(self, other):
        if isinstance(other, FockOperator):
            if other.n_max != self.n_max:
                raise ValueError("operators live on different truncations")
            return other.data
        return None

    def is_diagonal(self) -> bool:
        return np.count_nonzero(self.data) == np.count_nonzero(np.diagonal(self.data))

    def __matmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.data @ other
        # diagonal factors scale rows/columns exactly, without BLAS summation
        if other.is_diagonal():
            return FockOperator(self.data * np.diagonal(o)[None, :], self.n_max)
        if self.is_diagonal():
            return FockOperator(np.diagonal(self.data)[:, None] * o, self.n_max)
        return FockOperator(self.data @ o, self.n_max)

    def __add__(self, other):
        return FockOperator(self.data + self._coerce(other), self.n_max)

    def __sub__(self, other):
        return FockOperator(self.data - self._coerce(other), self.n_max)

    def __mul__(self, c):
        if isinstance(c, FockOperator):
            return NotImplemented
        return FockOperator(c * self.data, self.n_max)

    __rmul__ = __mul__

    def __neg__(self):
        return FockOperator(-self.data, self.n_max)

    def __repr__(self):
        return f"FockOperator(n_max={self.n_max}, dim={self.dim})"

    def element(self, bra: tuple[int, int], ket: tuple[int, int]) -> complex:
        """Matrix element ``<bra| X |ket>`` for number-basis labels."""
        s = self.n_max + 1
        return complex(self.data[bra[0] * s + bra[1], ket[0] * s + ket[1]])


def commutator(A: FockOperator, B: FockOperator) -> FockOperator:
    return A @ B - B @ A


def _check_nmax(n_max: int):
    if int(n_max) != n_max or n_max < 1:
        raise ValueError("n_max must be an integer >= 1")


@lru_cache(maxsize=8)
def _single_ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)


def doubled_operators(n_max: int):
    """Ladder operators ``(a1, a1_dag, a2, a2_dag)`` of the doubled mode."""
    _check_nmax(n_max)
    a = _single_ladder(n_max)
    eye = np.eye(n_max + 1)
    a1 = FockOperator(np.kron(a, eye), n_max)
    a2 = FockOperator(np.kron(eye, a), n_max)
    return a1, a1.dag, a2, a2.dag


def number_operators(n_max: int):
    """Exact integer-valued ``(N1, N2)``; ``a+ a`` from products of square roots is not."""
    _check_nmax(n_max)
    num = np.diag(np.arange(n_max + 1, dtype=float))
    eye = np.eye(n_max + 1)
    return FockOperator(np.kron(num, eye), n_max), FockOperator(np.kron(eye, num), n_max)


def charge(n_max: int) -> FockOperator:
    """Generator ``N1 - N2`` of the global phase transformation."""
    n1, n2 = number_operators(n_max)
    return n1 - n2


@lru_cache(maxsize=8)
def _swap_permutation(n_max: int) -> np.ndarray:
    s = n_max + 1
    n1, n2 = np.divmod(np.arange(s * s), s)
    return n2 * s + n1


def tilde(X: FockOperator) -> FockOperator:
    """Tilde conjugate: factor swap followed by entrywise complex conjugation."""
    s = X.n_max + 1
    # element (n1 n2, m1 m2) -> (n2 n1, m2 m1); same permutation as _swap_permutation
    swapped = X.data.reshape(s, s, s, s).transpose(1, 0, 3, 2).reshape(s * s, s * s)
    return FockOperator(np.conj(swapped), X.n_max)


def bra_I(n_max: int) -> np.ndarray:
    """Unnormalized row vector ``sum_n <n, n|``."""
    _check_nmax(n_max)
    s = n_max + 1
    v = np.zeros(s * s)
    v[np.arange(s) * (s + 1)] = 1.0
    return v


def thermal_ket(n: float, n_max: int) -> np.ndarray:
    """Thermal ket with weights ``(1/(1+n)) (n/(1+n))^m`` on ``|m, m>``."""
    _check_nmax(n_max)
    if not np.isfinite(n) or n < 0:
        raise ValueError("occupation n must be finite and >= 0")
    s = n_max + 1
    m = np.arange(s)
    c = (1.0 / (1.0 + n)) * (n / (1.0 + n)) ** m
    v = np.zeros(s * s)
    v[m * (s + 1)] = c
    return v


@dataclass(frozen=True)
class HuSpec:
    """Parameters of the unperturbed doubled Hamiltonian.

    ``gamma`` is the free real function; ``gamma = 0`` is the thermally
    causal choice.
    """

    omega: float
    n: float
    ndot: float
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("omega", "n", "ndot", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.n < 0:
            raise ValueError("n must be >= 0")

    @property
    def zetas(self) -> tuple[float, float, float]:
        n, nd, g = self.n, self.ndot, self.gamma
        z1 = nd + g
        z2 = nd + n / (1.0 + n) * g
        z3 = -nd - (1.0 + 2.0 * n) / (2.0 * (1.0 + n)) * g
        return z1, z2, z3


def build_hu(spec: HuSpec, n_max: int) -> FockOperator:
    """Unperturbed Hamiltonian

    ``w (N1 - N2) + i {z1 a1 a2 + z2 a1+ a2+ + z3 (N1 + N2) - z2}``.
    """
    _check_nmax(n_max)
    z1, z2, z3 = spec.zetas
    if not all(np.isfinite(z) for z in (z1, z2, z3)):
        raise ValueError("non-finite zeta coefficients")
    s = n_max + 1
    n1, n2 = np.divmod(np.arange(s * s), s)
    data = np.zeros((s * s, s * s), dtype=complex)
    idx = np.arange(s * s)
    data[idx, idx] = spec.omega * (n1 - n2) + 1j * (z3 * (n1 + n2) - z2)
    # a1 a2 : |n1, n2> -> sqrt(n1 n2) |n1 - 1, n2 - 1>; a1+ a2+ is its transpose
    both = (n1 > 0) & (n2 > 0)
    src = idx[both]
    dst = src - s - 1
    amp = np.sqrt(n1[both] * n2[both].astype(float))
    data[dst, src] += 1j * z1 * amp
    data[src, dst] += 1j * z2 * amp
    return FockOperator(data, n_max)


def interior_mask(n_max: int) -> np.ndarray:
    """Boolean mask of basis states with both indices below ``n_max``."""
    s = n_max + 1
    n1, n2 = np.divmod(np.arange(s * s), s)
    return (n1 < n_max) & (n2 < n_max)


@dataclass(frozen=True)
class ResidualReport:
    """Max-norm residuals of the subsidiary conditions, interior components only.

    r1: <I|a1 - <I|a2+ ; r1_dag: <I|a1+ - <I|a2 ; r2: <I|H_u ;
    r3, r4: the two annihilation conditions of the thermal ket.
    """

    r1: float
    r1_dag: float
    r2: float
    r3: float
    r4: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("r1", "r1_dag", "r2", "r3", "r4")}


def subsidiary_residuals(n_max: int, spec: HuSpec, ket: np.ndarray, n: float | None = None) -> ResidualReport:
    """Residuals of the bra, Hamiltonian and thermal-ket conditions.

    ``n`` is the occupation entering the ket conditions; it defaults to
    ``spec.n``.
    """
    _check_nmax(n_max)
    d = (n_max + 1) ** 2
    ket = np.asarray(ket)
    if ket.shape != (d,):
        raise ValueError(f"ket has shape {ket.shape}, expected {(d,)}")
    n = spec.n if n is None else n
    a1, a1d, a2, a2d = doubled_operators(n_max)
    hu = build_hu(spec, n_max)
    mask = interior_mask(n_max)
    # <I| and the thermal ket live on the diagonal states |m, m>
    diag = np.arange(n_max + 1) * (n_max + 2)
    c = ket[diag]

    def norm(v):
        return float(np.max(np.abs(v[mask])))

    def bra(X):
        return X.data[diag].sum(axis=0)

    def apply(X, Y, alpha, beta):
        return alpha * (X.data[:, diag] @ c) - beta * (Y.data[:, diag] @ c)

    if np.any(np.delete(ket, diag)):
        raise ValueError("ket must be supported on the diagonal states |m, m>")
    r1 = norm(bra(a1) - bra(a2d))
    r1d = norm(bra(a1d) - bra(a2))
    r2 = norm(bra(hu))
    r3 = norm(apply(a1, a2d, 1.0 + n, n))
    r4 = norm(apply(a2, a1d, 1.0 + n, n))
    return ResidualReport(r1, r1d, r2, r3, r4)


def expectation(X: FockOperator, n: float, n_max: int | None = None) -> complex:
    """``<I| X |Psi_k>`` for the thermal ket at occupation ``n``."""
    n_max = X.n_max if n_max is None else n_max
    if n_max != X.n_max:
        raise ValueError("operator truncation does not match n_max")
    return complex(bra_I(n_max) @ (X.data @ thermal_ket(n, n_max)))


def ket_normalization(n: float, n_max: int) -> float:
    """``<I|Psi_k> = 1 - (n/(1+n))^(n_max+1)``."""
    return 1.0 - (n / (1.0 + n)) ** (n_max + 1)
