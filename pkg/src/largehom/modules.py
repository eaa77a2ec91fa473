"""Finite-dimensional modules over an Artinian quotient ring.

A module is a k-vector space with one matrix per ring variable (acting on
column vectors).  Graded modules also record the internal degree of each
basis vector.  Submodules and quotients are built by linear algebra, so no
Groebner bases over R are ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotAMorphism, NotGraded
from .exactla import QuotientSpace, Subspace, matmul_mod
from .rings import QuotientRing, RingIdeal


@dataclass(eq=False)
class FDModule:
    owner: QuotientRing
    dim: int
    actions: list[np.ndarray]
    degrees: np.ndarray | None = None
    label: str = "M"

    def __post_init__(self):
        R = self.owner
        p = R.p
        self.actions = [np.mod(np.asarray(a, np.int64), p).reshape(
            self.dim, self.dim) for a in self.actions]
        if len(self.actions) != R.nvars:
            raise DimensionMismatch("need one action matrix per variable")
        if self.degrees is not None:
            self.degrees = np.asarray(self.degrees, np.int64).reshape(
                self.dim)
        self._mono = None
        self._verify()

    @property
    def graded(self) -> bool:
        return self.degrees is not None and self.owner.graded

    def _verify(self):
        """Spot-check commutation, the ring relations and degree shifts."""
        R = self.owner
        p = R.p
        A = self.actions
        for i in range(len(A)):
            for j in range(i + 1, len(A)):
                if np.any(matmul_mod(A[i], A[j], p)
                          != matmul_mod(A[j], A[i], p)):
                    raise NotAMorphism("variable actions do not commute")
        for rel in R.defining_gens:
            if np.any(self.polynomial_action(rel)):
                raise NotAMorphism("module does not satisfy a ring relation")
        if self.degrees is not None and self.dim:
            for a in A:
                r, c = np.nonzero(a)
                if np.any(self.degrees[r] != self.degrees[c] + 1):
                    raise NotGraded("a variable does not raise degree by one")

    def polynomial_action(self, f) -> np.ndarray:
        p = self.owner.p
        out = np.zeros((self.dim, self.dim), np.int64)
        eye = np.eye(self.dim, dtype=np.int64)
        for mono, c in f.terms.items():
            m = eye
            for j, e in enumerate(mono):
                for _ in range(e):
                    m = matmul_mod(self.actions[j], m, p)
            out = (out + c * m) % p
        return out

    @property
    def monomial_actions(self) -> np.ndarray:
        """Stack of matrices for every standard monomial of R."""
        if self._mono is None:
            R = self.owner
            p = R.p
            out = np.zeros((R.dim, self.dim, self.dim), np.int64)
            out[0] = np.eye(self.dim, dtype=np.int64)
            done = {R.monomial_basis[0]: 0}
            for b, mono in enumerate(R.monomial_basis):
                if b == 0:
                    continue
                j = next(j for j, e in enumerate(mono) if e)
                prev = mono[:j] + (mono[j] - 1,) + mono[j + 1:]
                out[b] = matmul_mod(self.actions[j], out[done[prev]], p)
                done[mono] = b
            self._mono = out
        return self._mono

    def element_action(self, r: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by the ring element with coordinates r."""
        p = self.owner.p
        r = np.mod(np.asarray(r, np.int64), p)
        return np.mod(np.tensordot(r, self.monomial_actions, axes=1), p)

    def maximal_part(self) -> Subspace:
        """m·M as a subspace."""
        p = self.owner.p
        if not self.dim or not self.actions:
            return Subspace.zero(self.dim, p)
        return Subspace.span(np.hstack(self.actions).T, self.dim, p)

    def generated_by(self, vectors) -> Subspace:
        """R-submodule generated by the given vectors (as a subspace)."""
        p = self.owner.p
        v = np.asarray(vectors, np.int64).reshape(-1, self.dim)
        if v.shape[0] == 0:
            return Subspace.zero(self.dim, p)
        imgs = np.einsum("bij,kj->bki", self.monomial_actions, v)
        return Subspace.span(np.mod(imgs.reshape(-1, self.dim), p),
                             self.dim, p)

    def is_submodule(self, W: Subspace) -> bool:
        return all(W.contains_all(matmul_mod(W.basis, a.T, self.owner.p))
                   for a in self.actions) if W.dim else True

    def submodule(self, W: Subspace, label: str = "N") -> tuple["FDModule",
                                                                np.ndarray]:
        """Restriction to an invariant subspace; also returns the inclusion
        matrix (columns = basis of W in M-coordinates)."""
        p = self.owner.p
        if not self.is_submodule(W):
            raise NotAMorphism("subspace is not closed under the action")
        B = W.basis
        acts = [W.coords(matmul_mod(B, a.T, p)).T for a in self.actions]
        deg = None
        if self.degrees is not None:
            deg = _row_degrees(B, self.degrees)
        return FDModule(self.owner, W.dim, acts, deg, label), B.T.copy()

    def quotient(self, W: Subspace, label: str = "M/N") -> tuple["FDModule",
                                                                 np.ndarray]:
        """M/W for an invariant subspace W; also returns the projection."""
        p = self.owner.p
        if not self.is_submodule(W):
            raise NotAMorphism("subspace is not closed under the action")
        Q = QuotientSpace(Subspace.full(self.dim, p), W)
        reps = Q.reps
        acts = [Q.coords(matmul_mod(reps, a.T, p)).T for a in self.actions]
        proj = Q.coords(np.eye(self.dim, dtype=np.int64)).T
        deg = None
        if self.degrees is not None:
            deg = _row_degrees(reps, self.degrees)
        return FDModule(self.owner, Q.dim, acts, deg, label), proj

    def __repr__(self):
        return f"FDModule({self.label}, dim={self.dim})"


def _row_degrees(rows: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    out = np.zeros(rows.shape[0], np.int64)
    for k, r in enumerate(rows):
        ds = set(degrees[np.flatnonzero(r)].tolist())
        if len(ds) > 1:
            raise NotGraded("basis vector is not homogeneous")
        out[k] = ds.pop() if ds else 0
    return out


def _graded_degrees(R: QuotientRing) -> np.ndarray | None:
    return R.degrees.copy() if R.graded else None


def regular_module(R: QuotientRing) -> FDModule:
    acts = [R.var_mats[j] for j in range(R.nvars)]
    return FDModule(R, R.dim, acts, _graded_degrees(R), "R")


def residue_field(R: QuotientRing) -> FDModule:
    acts = [np.zeros((1, 1), np.int64) for _ in range(R.nvars)]
    return FDModule(R, 1, acts, np.zeros(1, np.int64), "k")


def ideal_module(R: QuotientRing, I: RingIdeal) -> tuple[FDModule, np.ndarray]:
    """I as an R-module, with its inclusion into R."""
    M, inc = regular_module(R).submodule(I.subspace, "I")
    return M, inc


def cyclic_module(R: QuotientRing, I: RingIdeal) -> tuple[FDModule, np.ndarray]:
    """R/I, with the projection R -> R/I."""
    return regular_module(R).quotient(I.subspace, "R/I")


def free_module(R: QuotientRing, shifts) -> FDModule:
    """R^a with generators in the given internal degrees."""
    shifts = list(shifts)
    a = len(shifts)
    D = R.dim
    acts = [np.kron(np.eye(a, dtype=np.int64), R.var_mats[j])
            for j in range(R.nvars)]
    deg = None
    if R.graded:
        deg = np.concatenate([R.degrees + s for s in shifts]) if a else \
            np.zeros(0, np.int64)
    return FDModule(R, a * D, acts, deg, f"R^{a}")


def presented_module(R: QuotientRing, shifts, relations) -> FDModule:
    """Coker of the relations (vectors in R^a, flattened) in R^a."""
    F = free_module(R, shifts)
    W = F.generated_by(relations)
    M, _ = F.quotient(W, "coker")
    return M


def random_graded_module(R: QuotientRing, rng: np.random.Generator,
                         max_gens: int = 2, max_rels: int = 2) -> FDModule:
    """A random graded quotient of a small free module."""
    if not R.graded:
        raise NotGraded("random graded modules need a graded ring")
    p = R.p
    D = R.dim
    a = int(rng.integers(1, max_gens + 1))
    shifts = sorted(int(s) for s in rng.integers(0, 2, size=a))
    top = R.top_degree
    rels = []
    for _ in range(int(rng.integers(0, max_rels + 1))):
        d = int(rng.integers(min(shifts) + 1, top + max(shifts) + 1))
        v = np.zeros((a, D), np.int64)
        for g, s in enumerate(shifts):
            # only non-unit entries, so the generators stay minimal
            idx = R.degree_indices(d - s) if d > s else np.zeros(0, int)
            if idx.size:
                v[g, idx] = rng.integers(0, p, size=idx.size)
        if np.any(v):
            rels.append(v.ravel())
    return presented_module(R, shifts, np.array(rels).reshape(-1, a * D))


@dataclass
class ModuleMap:
    """A k-linear map of R-modules; ``matrix`` acts on column vectors."""
    source: FDModule
    target: FDModule
    matrix: np.ndarray

    def __post_init__(self):
        p = self.source.owner.p
        self.matrix = np.mod(np.asarray(self.matrix, np.int64), p).reshape(
            self.target.dim, self.source.dim)
        for a, b in zip(self.source.actions, self.target.actions):
            if np.any(matmul_mod(self.matrix, a, p)
                      != matmul_mod(b, self.matrix, p)):
                raise NotAMorphism("map does not commute with the action")
        if self.source.graded and self.target.graded:
            r, c = np.nonzero(self.matrix)
            if np.any(self.target.degrees[r] != self.source.degrees[c]):
                raise NotAMorphism("map is not homogeneous of degree zero")


def identity_map(M: FDModule) -> ModuleMap:
    return ModuleMap(M, M, np.eye(M.dim, dtype=np.int64))


def quotient_to_residue(R: QuotientRing, I: RingIdeal) -> ModuleMap:
    """The canonical surjection R/I -> k sending the class of 1 to 1."""
    M, proj = cyclic_module(R, I)
    k = residue_field(R)
    p = R.p
    Q = QuotientSpace(Subspace.full(M.dim, p), M.maximal_part())
    row = Q.coords(np.eye(M.dim, dtype=np.int64)).T
    if row.shape[0] == 1:
        one = int(matmul_mod(row, proj[:, :1], p)[0, 0])
        row = row * pow(one, p - 2, p) % p
    else:
        row = np.zeros((1, M.dim), np.int64)
    return ModuleMap(M, k, row)


def submodule_inclusion(R: QuotientRing, small: RingIdeal,
                        big: RingIdeal) -> ModuleMap:
    """The inclusion small ↪ big of ideals as a module map."""
    if not big.subspace.contains_all(small.subspace.basis):
        raise NotAMorphism("ideals are not nested")
    A, inc_a = ideal_module(R, small)
    B, _ = ideal_module(R, big)
    mat = big.subspace.coords(inc_a.T).T if A.dim else \
        np.zeros((B.dim, 0), np.int64)
    return ModuleMap(A, B, mat)
