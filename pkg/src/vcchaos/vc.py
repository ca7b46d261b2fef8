"""Generalized Rademacher and Vilenkin-Chrestenson functions and transforms.

Paley indexing throughout: the function with index n = sum(n_j * p**j) is the
product over j of the j-th Rademacher function raised to the n_j.  On the
rank-k grid its value table is

    VC[n, m] = w ** sum_j(n_j * x_j(m)),   w = exp(2*pi*i/p),

where x_j(m) is the j-th point digit of cell m's left endpoint, i.e. the
(k-1-j)-th integer digit of m.  That makes VC the k-fold Kronecker power of
the p-point DFT matrix composed with a digit reversal of the index, and the
matrix is symmetric and satisfies VC * conj(VC)^t = p**k * I.

Transform convention (both modes): stage t applies a plain p-point DFT along
the digit axis with stride p**t (no twiddle factors exist for this group),
and a single digit-reversal permutation at the end aligns coefficient order
with Paley order.  Forward = conjugate kernel and 1/p**k scaling, so forward
output n is the coefficient of VC_n; inverse rebuilds cell values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .cyclo import CycloValue, _power_residues, root_of_unity
from .pary import check_rank, digit_count, digits_of_integer
from .stepfn import StepFn


def rademacher(p: int, k: int, cap: int | None = None) -> StepFn:
    """R_k: value w**(x_k) on each rank-(k+1) cell, x_k the k-th point digit."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    cells = check_rank(p, k + 1, cap)
    return StepFn(p, k + 1, [root_of_unity(p, m % p) for m in range(cells)], cap)


def vc_function(p: int, n: int, cap: int | None = None) -> StepFn:
    """VC_n as a step function at rank digit_count(n); VC_0 is constant 1."""
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    ndigits = digits_of_integer(n, p)
    rank = len(ndigits)
    cells = check_rank(p, rank, cap)
    values = []
    for m in range(cells):
        mdigits = digits_of_integer(m, p)
        mdigits = mdigits + (0,) * (rank - len(mdigits))
        e = sum(nj * mdigits[rank - 1 - j] for j, nj in enumerate(ndigits)) % p
        values.append(root_of_unity(p, e))
    return StepFn(p, rank, values, cap)


def exponent_table(p: int, k: int, cap: int | None = None) -> np.ndarray:
    """(p**k, p**k) table E with VC[n, m] = w**E[n, m]."""
    cells = check_rank(p, k, cap)
    digits = np.empty((cells, max(k, 1)), dtype=np.int64)
    idx = np.arange(cells)
    for j in range(max(k, 1)):
        digits[:, j] = (idx // p**j) % p
    point_digits = digits[:, ::-1]
    return (digits @ point_digits.T) % p


@dataclass(frozen=True)
class VCMatrix:
    """Value table of VC_n on rank-k cells, stored as exponents mod p."""

    p: int
    k: int
    exponents: np.ndarray

    @classmethod
    def build(cls, p: int, k: int, cap: int | None = None) -> "VCMatrix":
        return cls(p, k, exponent_table(p, k, cap))

    @property
    def size(self) -> int:
        return self.p**self.k

    def entry(self, n: int, m: int) -> CycloValue:
        return root_of_unity(self.p, int(self.exponents[n, m]))

    def row(self, n: int) -> list[CycloValue]:
        return [self.entry(n, m) for m in range(self.size)]

    def complex_array(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.exponents / self.p)


def vc_matrix(p: int, k: int, cap: int | None = None) -> VCMatrix:
    return VCMatrix.build(p, k, cap)


def verify_inverse_identity(p: int, k: int, cap: int | None = None) -> bool:
    """Exact check that VC^(k) * conj-transpose(VC^(k)) = p**k * Identity.

    Each Gram entry is a sum of p**k roots of unity; tallying exponent
    multiplicities and reducing the tally against the p-th cyclotomic
    polynomial decides entrywise vanishing in exact integer arithmetic.
    """
    cells = check_rank(p, k, cap)
    table = exponent_table(p, k, cap)
    residue_rows = np.array(_power_residues(p), dtype=np.int64)
    row_offsets = p * np.arange(cells)[:, None]
    for i in range(cells):
        diff = (table[i][None, :] - table) % p
        counts = np.bincount(
            (diff + row_offsets).ravel(), minlength=p * cells
        ).reshape(cells, p)
        if counts[i, 0] != cells or counts[i, 1:].any():
            return False
        residues = counts @ residue_rows
        residues[i] = 0
        if residues.any():
            return False
    return True


def matrix_op_norm(p: int, k: int, iterations: int = 30, cap: int | None = None) -> float:
    """Power-iteration estimate of the (2,2) operator norm of VC^(k)."""
    cells = check_rank(p, k, cap)
    a = np.exp(2j * np.pi * exponent_table(p, k, cap) / p)
    x = np.ones(cells) / math.sqrt(cells)
    for _ in range(max(iterations, 1)):
        y = a @ x
        x = a.conj().T @ y
        norm = np.linalg.norm(x)
        if norm == 0:
            return 0.0
        x = x / norm
    return float(np.linalg.norm(a @ x) / np.linalg.norm(x))


# -- fast transform ----------------------------------------------------------


def _length_rank(length: int, p: int) -> int:
    k = 0
    n = length
    while n > 1:
        if n % p:
            raise ValueError(f"length {length} is not a power of the base {p}")
        n //= p
        k += 1
    if length < 1:
        raise ValueError("length must be positive")
    return k


def _digit_reversal(p: int, k: int) -> list[int]:
    out = []
    for n in range(p**k):
        digits = digits_of_integer(n, p)
        digits = digits + (0,) * (k - len(digits))
        out.append(sum(d * p**(k - 1 - j) for j, d in enumerate(digits)))
    return out


def vc_transform_float(values, p: int, direction: str = "forward") -> np.ndarray:
    """Radix-p transform in complex floats; see the module convention note."""
    arr = np.asarray(values, dtype=np.complex128)
    k = _length_rank(arr.size, p)
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    if k == 0:
        return arr.copy()
    sign = -1.0 if direction == "forward" else 1.0
    kernel = np.exp(sign * 2j * np.pi / p * np.outer(np.arange(p), np.arange(p)))
    tensor = arr.reshape((p,) * k)
    for axis in range(k):
        tensor = np.moveaxis(np.tensordot(kernel, tensor, axes=([1], [axis])), 0, axis)
    tensor = tensor.transpose(tuple(reversed(range(k))))
    out = tensor.reshape(arr.size)
    if direction == "forward":
        out = out / arr.size
    return out


def vc_transform_exact(values, p: int, direction: str = "forward") -> list[CycloValue]:
    """Radix-p transform in exact cyclotomic arithmetic.

    Stage t does p-point DFT butterflies with stride p**t; root-of-unity
    multiplies are coefficient rotations, so each butterfly is exact.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    vals = [CycloValue.coerce(v, p) for v in values]
    order = 1
    for v in vals:
        order = math.lcm(order, v.order)
    vals = [v.promote(order) for v in vals]
    step = order // p  # w_p = w_order**step
    length = len(vals)
    k = _length_rank(length, p)
    sign = -1 if direction == "forward" else 1
    for stage in range(k):
        stride = p**stage
        block = stride * p
        out = list(vals)
        for base in range(0, length, block):
            for off in range(stride):
                idx = [base + off + t * stride for t in range(p)]
                xs = [vals[i] for i in idx]
                for a in range(p):
                    acc = xs[0]
                    for b in range(1, p):
                        acc = acc + xs[b].rotated(sign * a * b % p * step)
                    out[idx[a]] = acc
        vals = out
    reversal = _digit_reversal(p, k)
    result = [vals[reversal[n]] for n in range(length)]
    if direction == "forward":
        scale = Fraction(1, length)
        result = [v.scale(scale) for v in result]
    return result


def vc_transform(values, p: int, direction: str = "forward", mode: str = "exact"):
    if mode == "exact":
        return vc_transform_exact(values, p, direction)
    if mode == "float":
        return vc_transform_float(values, p, direction)
    raise ValueError(f"unknown mode {mode!r}")


# -- coefficient vectors and synthesis ----------------------------------------


@dataclass(frozen=True)
class CoeffVector:
    """Finitely supported map index -> coefficient.

    Exact mode holds CycloValue/Fraction entries; float mode holds complex
    floats.  Both expose the same mapping interface.
    """

    p: int
    entries: Mapping[int, object]
    mode: str = "exact"

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"base must be >= 2, got {self.p}")
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if any(n < 0 for n in self.entries):
            raise ValueError("indices must be nonnegative")

    @property
    def support(self) -> list[int]:
        return sorted(self.entries)

    @property
    def max_index(self) -> int:
        return max(self.entries, default=0)


def synthesize(coeffs, p: int | None = None, cap: int | None = None) -> StepFn:
    """Exact sum of coeff[n] * VC_n, evaluated via the inverse fast transform."""
    if isinstance(coeffs, CoeffVector):
        if coeffs.mode != "exact":
            raise ValueError("synthesize needs exact-mode coefficients")
        entries, p = coeffs.entries, coeffs.p
    else:
        entries = coeffs
    if p is None:
        raise ValueError("base p is required when passing a plain mapping")
    if any(n < 0 for n in entries):
        raise ValueError("indices must be nonnegative")
    rank = max((digit_count(n, p) for n in entries), default=0)
    cells = check_rank(p, rank, cap)
    vec: list = [0] * cells
    for n, c in entries.items():
        vec[n] = c
    return StepFn(p, rank, vc_transform_exact(vec, p, "inverse"), cap)
