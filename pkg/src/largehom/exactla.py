"""Dense linear algebra over prime fields F_p.

Matrices are plain ``numpy`` int64 arrays whose entries are reduced into
``[0, p)``; the modulus travels alongside as an explicit argument.  The
elimination kernel is a blocked Gauss-Jordan: narrow column panels are
factored with a compiled scalar loop, and the trailing update is a float64
matrix product, which is exact as long as every intermediate stays below
2**53.  A running bound on the magnitude of unreduced entries decides when a
full reduction mod p is required.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import DimensionMismatch, NotPrime, QuotientMapError

DEFAULT_PRIME = 32003
MAX_PRIME = 2**31

_EXACT = float(2**53)
_PANEL = 48


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return ``p`` if it is a prime below 2**31, else raise NotPrime."""
    p = int(p)
    if p < 2 or p > MAX_PRIME:
        raise NotPrime(f"modulus {p} outside [2, 2^31]")
    if p % 2 == 0:
        if p == 2:
            return p
        raise NotPrime(f"{p} is not prime")
    f = 3
    while f * f <= p:
        if p % f == 0:
            raise NotPrime(f"{p} is not prime (divisible by {f})")
        f += 2
    return p


def as_fp(a, p: int) -> np.ndarray:
    """Copy ``a`` into an int64 array reduced into [0, p)."""
    arr = np.asarray(a, dtype=object if _needs_object(a) else np.int64)
    return np.mod(arr, p).astype(np.int64)


def _needs_object(a) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype == object
    try:
        flat = np.asarray(a, dtype=object).ravel()
    except Exception:
        return False
    return any(isinstance(v, int) and abs(v) >= 2**62 for v in flat)


def inv_mod(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse mod p")
    return pow(a, p - 2, p)


# --------------------------------------------------------------------------
# products


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for reduced int64 operands."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    if inner * (p - 1) ** 2 < _EXACT:
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return np.fmod(prod, p).astype(np.int64)
    # split a into 16-bit limbs and chunk the inner dimension
    chunk = max(1, int(_EXACT // ((2**16) * (p - 1))))
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    lo = (a & 0xFFFF).astype(np.float64)
    hi = (a >> 16).astype(np.float64)
    bf = b.astype(np.float64)
    shift = pow(2, 16, p)
    for s in range(0, inner, chunk):
        t = slice(s, s + chunk)
        plo = np.fmod(lo[..., t] @ bf[t], p).astype(np.int64)
        phi = np.fmod(hi[..., t] @ bf[t], p).astype(np.int64)
        out = (out + plo + (phi * shift) % p) % p
    return out


# --------------------------------------------------------------------------
# elimination


@njit(cache=True)
def _panel_profile(panel, p):
    """Row/column rank profile of a narrow panel (modified in place).

    Returns (rows, cols): the original row indices chosen as pivots and the
    panel-local pivot columns, both in pivot order.
    """
    m, w = panel.shape
    order = np.arange(m)
    rows = np.empty(min(m, w), dtype=np.int64)
    cols = np.empty(min(m, w), dtype=np.int64)
    r = 0
    for c in range(w):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if panel[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(w):
                tmp = panel[r, j]
                panel[r, j] = panel[piv, j]
                panel[piv, j] = tmp
            tmp = order[r]
            order[r] = order[piv]
            order[piv] = tmp
        # modular inverse by Fermat
        a = panel[r, c]
        inv = 1
        e = p - 2
        while e > 0:
            if e & 1:
                inv = (inv * a) % p
            a = (a * a) % p
            e >>= 1
        for j in range(c, w):
            panel[r, j] = (panel[r, j] * inv) % p
        for i in range(r + 1, m):
            f = panel[i, c]
            if f != 0:
                for j in range(c, w):
                    panel[i, j] = (panel[i, j] - f * panel[r, j]) % p
        rows[r] = order[r]
        cols[r] = c
        r += 1
    return rows[:r], cols[:r]


def _small_inverse(g: np.ndarray, p: int) -> np.ndarray:
    k = g.shape[0]
    aug = np.concatenate([g % p, np.eye(k, dtype=np.int64)], axis=1)
    red, rank, piv = _rref_naive(aug, p)
    if rank < k or list(piv[:k]) != list(range(k)):
        raise ArithmeticError("pivot block is singular")
    return red[:k, k:]


def _rref_naive(a: np.ndarray, p: int, pivot_cols: int | None = None):
    """Textbook Gauss-Jordan, one pivot at a time (reference path)."""
    a = np.mod(np.array(a, dtype=np.int64), p)
    m, n = a.shape
    limit = n if pivot_cols is None else pivot_cols
    r = 0
    piv = []
    for c in range(limit):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = a[r] * inv_mod(a[r, c], p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r]) % p) % p
        piv.append(c)
        r += 1
    return a, r, piv


def _bring_rows(a: np.ndarray, src: np.ndarray, start: int) -> None:
    """Permute rows so that ``src`` lands at ``start, start+1, ...``."""
    targets = list(range(start, start + len(src)))
    src = [int(s) for s in src]
    if src == targets:
        return
    tset, sset = set(targets), set(src)
    displaced = [t for t in targets if t not in sset]
    vacated = [s for s in src if s not in tset]
    old = np.array(src + displaced)
    a[targets + vacated] = a[old]


def rref(m: np.ndarray, p: int, pivot_cols: int | None = None):
    """Reduced row-echelon form of ``m`` over F_p.

    Returns ``(R, rank, pivots)`` where ``R`` has the same shape as ``m``
    (zero rows last).  With ``pivot_cols`` set, pivots are only sought among
    the first ``pivot_cols`` columns while row operations still act on the
    full width; this solves ``A x = B`` for an augmented ``[A | B]``.
    """
    a0 = np.asarray(m)
    if a0.ndim != 2:
        raise DimensionMismatch("rref expects a 2-d array")
    rows, cols = a0.shape
    limit = cols if pivot_cols is None else min(pivot_cols, cols)
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.int64), 0, []
    if rows * cols <= 4096:
        red, rank, piv = _rref_naive(a0, p, limit)
        return red, rank, piv

    a = np.mod(a0, p).astype(np.float64)
    step = float(p - 1) ** 2
    bound = float(p - 1)
    r = 0
    pivots: list[int] = []
    c0 = 0
    while c0 < limit and r < rows:
        c1 = min(c0 + _PANEL, limit)
        panel = np.fmod(a[r:, c0:c1], p).astype(np.int64)
        panel[panel < 0] += p
        prow, pcol = _panel_profile(panel, p)
        k = len(prow)
        if k == 0:
            c0 = c1
            continue
        # bring chosen rows to r..r+k-1, preserving pivot order
        _bring_rows(a, r + prow, r)
        blk = np.fmod(a[r:r + k, c0:], p)
        blk[blk < 0] += p
        gcols = pcol + c0
        g = blk[:, pcol].astype(np.int64)
        ginv = _small_inverse(g, p)
        top = matmul_mod(ginv, blk.astype(np.int64), p).astype(np.float64)
        a[r:r + k, c0:] = top
        fast = k * step + bound < _EXACT
        for sl in (slice(0, r), slice(r + k, rows)):
            if sl.stop - sl.start <= 0:
                continue
            x = np.fmod(a[sl, gcols], p)
            x[x < 0] += p
            if not np.any(x):
                continue
            if fast:
                a[sl, c0:] -= x @ top
            else:
                upd = matmul_mod(x.astype(np.int64), top.astype(np.int64), p)
                a[sl, c0:] = np.mod(np.fmod(a[sl, c0:], p) - upd, p)
        bound = bound + k * step if fast else float(p - 1)
        if bound + _PANEL * step >= _EXACT:
            a = np.fmod(a, p)
            a[a < 0] += p
            bound = float(p - 1)
        pivots.extend(int(c) for c in gcols)
        r += k
        c0 = c1
    out = np.fmod(a, p)
    out[out < 0] += p
    out = out.astype(np.int64)
    if r < rows and limit == cols:
        out[r:] = 0
    return out, r, pivots


def rank(m: np.ndarray, p: int) -> int:
    return rref(m, p)[1]


# --------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^n stored by its RREF basis (rows)."""

    ambient_dim: int
    basis: np.ndarray
    p: int
    pivots: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.basis.shape != (len(self.pivots), self.ambient_dim):
            raise DimensionMismatch("basis shape does not match pivots")

    @classmethod
    def span(cls, vectors, ambient_dim: int, p: int) -> "Subspace":
        vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient_dim)
        red, r, piv = rref(vecs, p)
        return cls(ambient_dim, red[:r].copy(), p, tuple(piv))

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim), np.int64), p, ())

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.int64), p,
                   tuple(range(ambient_dim)))

    @classmethod
    def coordinate(cls, indices, ambient_dim: int, p: int) -> "Subspace":
        idx = sorted(int(i) for i in indices)
        b = np.zeros((len(idx), ambient_dim), np.int64)
        b[np.arange(len(idx)), idx] = 1
        return cls(ambient_dim, b, p, tuple(idx))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.p == other.p
                and self.pivots == other.pivots
                and np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.ambient_dim, self.p, self.pivots,
                     self.basis.tobytes()))

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Remainders of ``vectors`` (rows) modulo this subspace."""
        v = np.mod(np.atleast_2d(np.asarray(vectors, np.int64)), self.p)
        if self.dim == 0:
            return v
        coef = v[:, list(self.pivots)]
        return np.mod(v - matmul_mod(coef, self.basis, self.p), self.p)

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_all(self, vectors) -> bool:
        vecs = np.asarray(vectors, np.int64).reshape(-1, self.ambient_dim)
        return vecs.shape[0] == 0 or not np.any(self.reduce(vecs))

    def coords(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of member vectors in the RREF basis."""
        v = np.mod(np.atleast_2d(np.asarray(vectors, np.int64)), self.p)
        return v[:, list(self.pivots)]

    def issubspace(self, other: "Subspace") -> bool:
        return other.contains_all(self.basis)


def _check_same(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim or a.p != b.p:
        raise DimensionMismatch("subspaces live in different spaces")


def kernel_basis(m: np.ndarray, p: int) -> Subspace:
    """The null space ``{v : m v = 0}`` as a Subspace of F_p^cols."""
    m = np.asarray(m)
    rows, cols = m.shape
    red, r, piv = rref(m, p)
    free = [c for c in range(cols) if c not in set(piv)]
    if not free:
        return Subspace.zero(cols, p)
    k = np.zeros((len(free), cols), np.int64)
    k[np.arange(len(free)), free] = 1
    if r:
        k[:, piv] = np.mod(-red[:r, free].T, p)
    return Subspace.span(k, cols, p)


def image_basis(m: np.ndarray, p: int) -> Subspace:
    """Column space of ``m`` as a Subspace of F_p^rows."""
    m = np.asarray(m)
    return Subspace.span(m.T, m.shape[0], p)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.span(np.vstack([a.basis, b.basis]), a.ambient_dim, a.p)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of the stacked bases."""
    _check_same(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.p)
    # x A = y B  <=>  [x | -y] [A; B] = 0
    stacked = np.vstack([a.basis, b.basis])
    rel = kernel_basis(stacked.T, a.p)
    if rel.dim == 0:
        return Subspace.zero(a.ambient_dim, a.p)
    vecs = matmul_mod(rel.basis[:, :a.dim], a.basis, a.p)
    return Subspace.span(vecs, a.ambient_dim, a.p)


def subspace_contains(a: Subspace, v) -> bool:
    return a.contains(v)


class QuotientSpace:
    """``top / bottom`` with a fixed basis of representatives.

    Representatives are the RREF rows of the remainders of ``top`` modulo
    ``bottom``, so they are deterministic.  ``coords`` sends vectors of
    ``top`` to coordinates of their classes.
    """

    def __init__(self, top: Subspace, bottom: Subspace,
                 reps: np.ndarray | None = None):
        _check_same(top, bottom)
        if not bottom.issubspace(top):
            raise DimensionMismatch("bottom is not contained in top")
        self.top = top
        self.bottom = bottom
        p = top.p
        if reps is None:
            rem = bottom.reduce(top.basis) if top.dim else top.basis
            red, r, _ = rref(rem, p)
            self.reps = red[:r].copy()
        else:
            self.reps = np.mod(np.asarray(reps, np.int64), p).reshape(
                -1, top.ambient_dim)
            if self.reps.shape[0] != top.dim - bottom.dim \
                    or not top.contains_all(self.reps):
                raise DimensionMismatch("representatives do not fit")
        self.p = p
        comb = np.vstack([bottom.basis, self.reps])
        # E = T @ comb with E in RREF; coefficients of v are v[piv] @ T
        aug = np.concatenate([comb, np.eye(comb.shape[0], dtype=np.int64)],
                             axis=1)
        e, rk, piv = rref(aug, p, pivot_cols=top.ambient_dim)
        if rk != comb.shape[0]:
            raise DimensionMismatch("representatives are not independent "
                                    "modulo the bottom space")
        self._piv = list(piv)
        self._transform = e[:rk, top.ambient_dim:]
        self._nb = bottom.dim

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    def coords(self, vectors) -> np.ndarray:
        v = np.mod(np.atleast_2d(np.asarray(vectors, np.int64)), self.p)
        if v.shape[0] and not self.top.contains_all(v):
            raise QuotientMapError("vector not in the numerator subspace")
        if self.top.dim == 0:
            return np.zeros((v.shape[0], 0), np.int64)
        full = matmul_mod(v[:, self._piv], self._transform, self.p)
        return full[:, self._nb:]


def induced_quotient_map(f: np.ndarray, a: Subspace, b: Subspace,
                         domain: Subspace | None = None,
                         codomain: Subspace | None = None) -> np.ndarray:
    """Matrix of the map ``domain/a -> codomain/b`` induced by ``f``.

    ``f`` acts on column vectors (shape ``(m, n)``).  ``domain`` and
    ``codomain`` default to the whole spaces.  Rows of the result index
    classes of the codomain quotient, columns those of the domain quotient,
    both on the representative bases of :class:`QuotientSpace`.
    """
    f = np.asarray(f, np.int64)
    p = a.p
    m, n = f.shape
    if a.ambient_dim != n or b.ambient_dim != m:
        raise DimensionMismatch("f does not match subspace dimensions")
    domain = domain if domain is not None else Subspace.full(n, p)
    codomain = codomain if codomain is not None else Subspace.full(m, p)
    if a.dim and not b.contains_all(matmul_mod(a.basis, f.T, p)):
        raise QuotientMapError("f does not map A into B")
    src = QuotientSpace(domain, a)
    dst = QuotientSpace(codomain, b)
    if src.dim == 0:
        return np.zeros((dst.dim, 0), np.int64)
    imgs = matmul_mod(src.reps, f.T, p)
    return dst.coords(imgs).T


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Canonical particular solutions of ``a x = b`` (columns of ``b``).

    Free variables are set to zero, so the answer is the one read off the
    RREF of the augmented system.  Raises ArithmeticError if inconsistent.
    """
    a = np.asarray(a, np.int64)
    b = np.asarray(b, np.int64)
    if b.ndim == 1:
        b = b[:, None]
    rows, cols = a.shape
    if b.shape[0] != rows:
        raise DimensionMismatch("right-hand side has wrong length")
    x = np.zeros((cols, b.shape[1]), np.int64)
    if b.shape[1] == 0:
        return x
    red, r, piv = rref(np.concatenate([a, b], axis=1), p, pivot_cols=cols)
    if np.any(red[r:, cols:]):
        raise ArithmeticError("inconsistent linear system")
    if r:
        x[piv] = red[:r, cols:]
    return x
