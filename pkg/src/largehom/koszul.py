"""Koszul complexes over Artinian quotient rings and their homology.

A free module of rank ``a`` over R is flattened to ``a * dim_k R``
coordinates (generator-major), so every differential is an ordinary matrix
over F_p.  For graded rings and homogeneous generators the homology is
computed one internal degree at a time, which keeps the chosen cycle
representatives homogeneous.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import (DegreeOutOfRange, NCViolation, NotPowerOfMaximalIdeal)
from .exactla import (QuotientSpace, Subspace, image_basis, kernel_basis,
                      matmul_mod, rref, subspace_intersect, subspace_sum)
from .report import CheckReport, fails, holds
from .rings import (QuotientRing, RingIdeal, RingMap, check_nc,
                    is_truncated_power)

_cache_lock = threading.Lock()


def cached(owner, key, build):
    """Memoize ``build()`` on ``owner`` under ``key`` (thread-safe)."""
    store = owner.__dict__.setdefault("_largehom_cache", {})
    with _cache_lock:
        if key in store:
            return store[key]
    value = build()
    with _cache_lock:
        return store.setdefault(key, value)


def _subsets(r: int, i: int) -> list[tuple[int, ...]]:
    return list(combinations(range(r), i))


def _merge_sign(s: tuple[int, ...], t: tuple[int, ...]) -> int:
    """Sign of e_S ∧ e_T relative to e_{S ∪ T} (0 if they overlap)."""
    if set(s) & set(t):
        return 0
    inv = sum(1 for a in s for b in t if a > b)
    return -1 if inv % 2 else 1


class KoszulComplex:
    """K(g_1..g_r; R) with flattened differentials."""

    def __init__(self, ring: QuotientRing, gens):
        self.ring = ring
        self.gens = [np.mod(np.asarray(g, np.int64), ring.p) for g in gens]
        self.length = len(self.gens)
        self.subsets = [_subsets(self.length, i)
                        for i in range(self.length + 1)]
        self.graded = ring.graded and all(ring.is_homogeneous(g)
                                          for g in self.gens)
        gdeg = [ring.homogeneous_degree(g) if self.graded else 0
                for g in self.gens]
        self.gen_degrees = [d if d is not None else 0 for d in gdeg]
        self._mult = [ring.mult_matrix(g) for g in self.gens]
        self.differentials = [None] + [self._build(i)
                                       for i in range(1, self.length + 1)]
        for i in range(2, self.length + 1):
            dd = matmul_mod(self.differentials[i - 1], self.differentials[i],
                            ring.p)
            if np.any(dd):
                raise ArithmeticError("Koszul differential does not square "
                                      "to zero")

    def rank(self, i: int) -> int:
        return comb(self.length, i) if 0 <= i <= self.length else 0

    def dim(self, i: int) -> int:
        return self.rank(i) * self.ring.dim

    def _build(self, i: int) -> np.ndarray:
        R = self.ring
        D = R.dim
        src = self.subsets[i]
        dst = {s: k for k, s in enumerate(self.subsets[i - 1])}
        d = np.zeros((len(dst) * D, len(src) * D), np.int64)
        for col, s in enumerate(src):
            for t, g in enumerate(s):
                row = dst[s[:t] + s[t + 1:]]
                blk = self._mult[g] if t % 2 == 0 else (-self._mult[g]) % R.p
                d[row * D:(row + 1) * D, col * D:(col + 1) * D] = blk
        return d

    def d(self, i: int) -> np.ndarray:
        """Differential K_i -> K_{i-1} (empty when out of range)."""
        if 1 <= i <= self.length:
            return self.differentials[i]
        return np.zeros((self.dim(i - 1), self.dim(i)), np.int64)

    def internal_degrees(self, i: int) -> np.ndarray:
        D = self.ring.dim
        out = np.empty(self.dim(i), np.int64)
        for k, s in enumerate(self.subsets[i] if 0 <= i <= self.length
                              else []):
            out[k * D:(k + 1) * D] = (sum(self.gen_degrees[g] for g in s)
                                      + self.ring.degrees)
        return out

    def wedge(self, u: np.ndarray, i: int, v: np.ndarray, j: int) -> np.ndarray:
        """Product of u ∈ K_i and v ∈ K_j in K_{i+j}."""
        R = self.ring
        D = R.dim
        if i + j > self.length:
            return np.zeros(0, np.int64)
        out = np.zeros(self.dim(i + j), np.int64)
        pos = {s: k for k, s in enumerate(self.subsets[i + j])}
        U = u.reshape(-1, D)
        V = v.reshape(-1, D)
        for a, s in enumerate(self.subsets[i]):
            if not np.any(U[a]):
                continue
            for b, t in enumerate(self.subsets[j]):
                sg = _merge_sign(s, t)
                if sg == 0 or not np.any(V[b]):
                    continue
                k = pos[tuple(sorted(s + t))]
                out[k * D:(k + 1) * D] += sg * R.multiply(U[a], V[b])
        return np.mod(out, R.p)

    def times_ring_element(self, c: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Scalar action of a ring element on a flattened chain."""
        R = self.ring
        M = R.mult_matrix(c)
        return matmul_mod(v.reshape(-1, R.dim), M.T, R.p).ravel()


@dataclass
class KoszulHomology:
    complex: KoszulComplex
    cycles: list[Subspace]
    boundaries: list[Subspace]
    classes: list[QuotientSpace]
    rep_degrees: list[list[int]] = field(default_factory=list)

    def dim(self, i: int) -> int:
        if 0 <= i <= self.complex.length:
            return self.classes[i].dim
        return 0

    @property
    def dims(self) -> list[int]:
        return [self.dim(i) for i in range(self.complex.length + 1)]

    def reps(self, i: int) -> np.ndarray:
        if 0 <= i <= self.complex.length:
            return self.classes[i].reps
        return np.zeros((0, 0), np.int64)

    def coords(self, i: int, cycles) -> np.ndarray:
        return self.classes[i].coords(cycles)


def _homology_degree(K: KoszulComplex, i: int):
    p = K.ring.p
    d_out = K.d(i)
    d_in = K.d(i + 1)
    n = K.dim(i)
    if not K.graded:
        Z = kernel_basis(d_out, p) if d_out.shape[0] else Subspace.full(n, p)
        B = image_basis(d_in, p) if d_in.shape[1] else Subspace.zero(n, p)
        Q = QuotientSpace(Z, B)
        return Z, B, Q, [0] * Q.dim
    degs = K.internal_degrees(i)
    degs_in = K.internal_degrees(i + 1)
    degs_out = K.internal_degrees(i - 1)
    zs, bs, reps, rdeg = [], [], [], []
    for deg in sorted(set(degs.tolist())):
        cols = np.flatnonzero(degs == deg)
        rows = np.flatnonzero(degs_out == deg)
        inc = np.flatnonzero(degs_in == deg)
        blk = d_out[np.ix_(rows, cols)]
        Zd = kernel_basis(blk, p) if rows.size else Subspace.full(cols.size, p)
        Bd = (image_basis(d_in[np.ix_(cols, inc)], p) if inc.size
              else Subspace.zero(cols.size, p))
        Qd = QuotientSpace(Zd, Bd)

        def lift(m):
            out = np.zeros((m.shape[0], n), np.int64)
            out[:, cols] = m
            return out
        zs.append(lift(Zd.basis))
        bs.append(lift(Bd.basis))
        reps.append(lift(Qd.reps))
        rdeg.extend([deg] * Qd.dim)
    Z = Subspace.span(np.vstack(zs) if zs else np.zeros((0, n)), n, p)
    B = Subspace.span(np.vstack(bs) if bs else np.zeros((0, n)), n, p)
    R = np.vstack(reps) if reps else np.zeros((0, n), np.int64)
    return Z, B, QuotientSpace(Z, B, reps=R), rdeg


def koszul_homology(R: QuotientRing, gens) -> KoszulHomology:
    """Homology of the Koszul complex on ``gens`` (caller trims them)."""
    if isinstance(gens, RingIdeal):
        gens = gens.gens
    K = KoszulComplex(R, gens)
    parts = [_homology_degree(K, i) for i in range(K.length + 1)]
    H = KoszulHomology(K, [z for z, *_ in parts], [b for _, b, *_ in parts],
                       [q for *_, q, _ in parts], [d for *_, d in parts])
    for i in range(K.length + 1):
        if not H.boundaries[i].issubspace(H.cycles[i]):
            raise ArithmeticError("boundaries not contained in cycles")
    return H


def ring_koszul_homology(R: QuotientRing) -> KoszulHomology:
    """H_*(R) := H_*(K(m)) on the variables (cached on the ring)."""
    return cached(R, "koszul", lambda: koszul_homology(
        R, [R.variable(j).coords for j in range(R.nvars)]))


def ideal_koszul_homology(R: QuotientRing, I: RingIdeal) -> KoszulHomology:
    """H_*(I) on a minimal generating set of I."""
    return koszul_homology(R, I.trimmed().gens)


def homology_product(H: KoszulHomology, i: int, j: int) -> Subspace:
    """Subspace of H_{i+j} spanned by products of classes in H_i, H_j."""
    K = H.complex
    p = K.ring.p
    if min(i, j) < 0:
        raise DegreeOutOfRange(f"negative homological degree in ({i}, {j})")
    target = H.dim(i + j)
    prods = []
    for u in H.reps(i):
        for v in H.reps(j):
            prods.append(K.wedge(u, i, v, j))
    if not prods or target == 0:
        return Subspace.zero(target, p)
    return Subspace.span(H.coords(i + j, np.array(prods)), target, p)


# ----------------------------------------------------------------------------
# induced maps


def _det_mod(a: np.ndarray, p: int) -> int:
    k = a.shape[0]
    if k == 0:
        return 1
    m = np.mod(a.copy(), p)
    det = 1
    for c in range(k):
        nz = np.flatnonzero(m[c:, c])
        if nz.size == 0:
            return 0
        r = c + nz[0]
        if r != c:
            m[[c, r]] = m[[r, c]]
            det = -det
        det = det * int(m[c, c]) % p
        inv = pow(int(m[c, c]), p - 2, p)
        for rr in range(c + 1, k):
            if m[rr, c]:
                m[rr] = (m[rr] - m[rr, c] * inv % p * m[c]) % p
    return det % p


def exterior_power(a: np.ndarray, i: int, p: int) -> np.ndarray:
    """∧^i of the map e_s -> sum_t a[s, t] f_t, as a (targets x sources)
    matrix on lexicographic wedge bases."""
    n, m = a.shape
    src = _subsets(n, i)
    dst = _subsets(m, i)
    out = np.zeros((len(dst), len(src)), np.int64)
    for c, s in enumerate(src):
        for r, t in enumerate(dst):
            out[r, c] = _det_mod(a[np.ix_(s, t)], p)
    return out


def koszul_chain_map(linear: np.ndarray, ring_map: np.ndarray, i: int,
                     p: int) -> np.ndarray:
    """Degree-i component of the DG map K(x; R) -> K(y; S) induced by
    e_s -> sum_t linear[s, t] f_t and coefficients mapped by ``ring_map``."""
    return np.mod(np.kron(exterior_power(linear, i, p), ring_map), p)


@dataclass
class InducedMap:
    matrix: np.ndarray
    source_dim: int
    target_dim: int
    rank: int

    @property
    def surjective(self) -> bool:
        return self.rank == self.target_dim

    @property
    def injective(self) -> bool:
        return self.rank == self.source_dim

    @property
    def nonzero(self) -> bool:
        return self.rank > 0


def _induced(matrix: np.ndarray, sdim: int, tdim: int, p: int) -> InducedMap:
    r = rref(matrix, p)[1] if matrix.size else 0
    return InducedMap(matrix, sdim, tdim, r)


def induced_map_HR_to_HS(R: QuotientRing, S: QuotientRing, proj: RingMap,
                         i: int) -> InducedMap:
    """The map H_i(R) -> H_i(S) on homology coordinates."""
    HR = ring_koszul_homology(R)
    HS = ring_koszul_homology(S)
    if i < 0:
        raise DegreeOutOfRange(f"negative homological degree {i}")
    p = R.p
    if HR.dim(i) == 0 or HS.dim(i) == 0:
        return _induced(np.zeros((HS.dim(i), HR.dim(i)), np.int64),
                        HR.dim(i), HS.dim(i), p)
    F = koszul_chain_map(proj.linear, proj.matrix, i, p)
    imgs = matmul_mod(HR.reps(i), F.T, p)
    return _induced(HS.coords(i, imgs).T, HR.dim(i), HS.dim(i), p)


@dataclass
class H1Comparison:
    matrix: np.ndarray
    tensor_dim: int
    rank: int

    @property
    def injective(self) -> bool:
        return self.rank == self.tensor_dim

    @property
    def nonzero(self) -> bool:
        return self.rank > 0


def _linear_coefficients(R: QuotientRing, gens) -> np.ndarray:
    n = R.nvars
    pos = [R.index[tuple(int(a == j) for a in range(n))] for j in range(n)]
    return np.array([g[pos] for g in gens], np.int64).reshape(len(gens), n)


def map_H1I_to_H1R(R: QuotientRing, I: RingIdeal) -> H1Comparison:
    """H_1(I) ⊗ k -> H_1(R), computed as H_1(I)/m H_1(I) -> H_1(R)."""
    if not check_nc(R, I).holds:
        raise NCViolation("I ∩ m² ≠ mI, so K(I) is not a subcomplex of K(R)")
    R.require_graded()
    p = R.p
    gens = I.trimmed().gens
    HR = ring_koszul_homology(R)
    if not gens:
        return H1Comparison(np.zeros((HR.dim(1), 0), np.int64), 0, 0)
    HI = koszul_homology(R, gens)
    KI = HI.complex
    Z = HI.cycles[1]
    # m·H_1(I) as a subspace of Z_1(I), together with B_1(I)
    moved = [KI.times_ring_element(R.variable(j).coords, z)
             for z in HI.reps(1) for j in range(R.nvars)]
    W = HI.boundaries[1]
    if moved:
        W = subspace_sum(W, Subspace.span(np.array(moved), Z.ambient_dim, p))
    T = QuotientSpace(Z, W)
    if T.dim == 0:
        return H1Comparison(np.zeros((HR.dim(1), 0), np.int64), 0, 0)
    C = _linear_coefficients(R, gens)
    F = koszul_chain_map(C, np.eye(R.dim, dtype=np.int64), 1, p)
    imgs = matmul_mod(T.reps, F.T, p)
    mat = HR.coords(1, imgs).T
    r = rref(mat, p)[1] if mat.size else 0
    return H1Comparison(mat, T.dim, r)


def lemma_power_check(R: QuotientRing, I: RingIdeal) -> CheckReport:
    """Every class of H_i(I) has a representative in m^{q-1} K_i(I) when
    R = Q/n^q (checked for each i >= 1)."""
    q = is_truncated_power(R)
    if q is None:
        raise NotPowerOfMaximalIdeal("ring is not a truncated polynomial ring")
    if not check_nc(R, I).holds:
        raise NCViolation("the ideal fails I ∩ m² = mI")
    p = R.p
    gens = I.trimmed().gens
    inputs = {"ideal": I.gens_text(), "power": q}
    if not gens:
        return CheckReport("lemma-power", holds("power-representatives"),
                           inputs, data={"degrees": []})
    H = koszul_homology(R, gens)
    K = H.complex
    rows = []
    for i in range(1, K.length + 1):
        n = K.dim(i)
        high = np.flatnonzero(np.tile(R.degrees, K.rank(i)) >= q - 1)
        W = Subspace.coordinate(high, n, p)
        Z, B = H.cycles[i], H.boundaries[i]
        covered = subspace_sum(subspace_intersect(Z, W), B)
        ok = covered == Z
        rows.append({"i": i, "dim_H": H.dim(i), "holds": ok})
        if not ok:
            bad = next(v for v in Z.basis if not covered.contains(v))
            return CheckReport(
                "lemma-power",
                fails("power-representatives", {"degree": i, "cycle": bad}),
                inputs, data={"degrees": rows})
    return CheckReport("lemma-power", holds("power-representatives"), inputs,
                       data={"degrees": rows})
