"""Minimal graded free resolutions, Betti tables, Tor and comparison maps.

Syzygies are k-subspaces of free modules R^b (flattened to b·dim_k R
coordinates, generator-major) and everything is computed one internal
degree at a time.  For an ungraded input every coordinate gets degree 0
and the same code runs on a single slice.

A differential d_i: F_i -> F_{i-1} is stored as an array ``V`` of shape
``(β_i, β_{i-1}, dim_k R)``: ``V[g, k]`` is the ring element in position
(k, g).  For i = 0 the array has shape ``(β_0, dim M)`` and holds the
images of the generators in M.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalInconsistency, LiftFailure, NotGraded
from .exactla import Subspace, kernel_basis, matmul_mod, rank, rref, solve
from .koszul import cached
from .modules import FDModule, ModuleMap, residue_field
from .parallel import pmap
from .rings import QuotientRing, RingElement, RingMap


def _flat_degrees(shifts: np.ndarray, ring_degrees: np.ndarray) -> np.ndarray:
    return (shifts[:, None] + ring_degrees[None, :]).ravel()


def _slices(degrees: np.ndarray) -> dict[int, np.ndarray]:
    return {int(d): np.flatnonzero(degrees == d)
            for d in np.unique(degrees)}


class FreeResolution:
    """A minimal free resolution F -> M, truncated at homological degree N.

    ``extend`` continues the computation, so one object per module serves
    every truncation that is asked for.
    """

    def __init__(self, module: FDModule):
        self.module = module
        self.ring = module.owner
        self.p = self.ring.p
        self.graded = module.graded
        R = self.ring
        self._rdeg = R.degrees if self.graded else np.zeros(R.dim, np.int64)
        self._mdeg = (module.degrees if self.graded
                      else np.zeros(module.dim, np.int64))
        self.shifts: list[np.ndarray] = []
        self.diffs: list[np.ndarray] = []
        self._lock = threading.RLock()
        # syzygies of the last level, per degree, in slice coordinates
        self._kernel: dict[int, Subspace] | None = None
        self._kernel_level = -1
        self.length = -1

    # -- coordinates ---------------------------------------------------------

    def rank(self, i: int) -> int:
        return len(self.shifts[i]) if 0 <= i <= self.length else 0

    def space_degrees(self, i: int) -> np.ndarray:
        """Internal degrees of the coordinates of F_i (F_{-1} := M)."""
        if i < 0:
            return self._mdeg
        return _flat_degrees(self.shifts[i], self._rdeg)

    def _act_var(self, level: int, j: int, rows: np.ndarray) -> np.ndarray:
        """Multiply vectors of F_level (or M when level = -1) by x_j."""
        R = self.ring
        if level < 0:
            return matmul_mod(rows, self.module.actions[j].T, self.p)
        n = rows.shape[0]
        out = matmul_mod(rows.reshape(-1, R.dim), R.var_mats[j].T, self.p)
        return out.reshape(n, -1)

    def _monomial_images(self, i: int, gens: np.ndarray, b: int,
                         diffs: np.ndarray | None = None) -> np.ndarray:
        """Rows: the monomial b times the images of the given generators."""
        R = self.ring
        V = self.diffs[i] if diffs is None else diffs
        if i == 0:
            return matmul_mod(V[gens], self.module.monomial_actions[b].T,
                              self.p)
        n = len(gens)
        flat = V[gens].reshape(-1, R.dim)
        return matmul_mod(flat, R.mult[b], self.p).reshape(n, -1)

    def slice_matrix(self, i: int, d: int,
                     diffs: np.ndarray | None = None) -> np.ndarray:
        """d_i restricted to internal degree d (rows: F_{i-1}, cols: F_i),
        both in increasing global coordinate order."""
        D = self.ring.dim
        cols = _slices(self.space_degrees(i)).get(d, np.zeros(0, np.int64))
        rows = _slices(self.space_degrees(i - 1)).get(d,
                                                      np.zeros(0, np.int64))
        out = np.zeros((rows.size, cols.size), np.int64)
        if not rows.size or not cols.size:
            return out
        g, b = np.divmod(cols, D)
        for bb in np.unique(b):
            sel = np.flatnonzero(b == bb)
            imgs = self._monomial_images(i, g[sel], int(bb), diffs)
            out[:, sel] = imgs[:, rows].T
        return out

    # -- construction --------------------------------------------------------

    def extend(self, N: int) -> "FreeResolution":
        with self._lock:
            while self.length < N:
                self._step()
        return self

    def _step(self):
        i = self.length + 1
        level = i - 1
        space_deg = self.space_degrees(level)
        sl = _slices(space_deg)
        if self._kernel is None:
            # level -1: the whole module is its own "syzygy" space
            self._kernel = {d: Subspace.full(idx.size, self.p)
                            for d, idx in sl.items()}
        elif self._kernel_level != level:
            self._kernel = self._kernels(level) if self.rank(level) else {}
        self._kernel_level = level
        K = self._kernel
        step = 1 if self.graded else 0
        width = space_deg.size

        def new_generators(d):
            idx = sl[d]
            Kd = K.get(d)
            if Kd is None or Kd.dim == 0:
                return np.zeros((0, width), np.int64)
            below = K.get(d - step)
            free = np.arange(Kd.dim)
            if below is not None and below.dim:
                full = np.zeros((below.dim, width), np.int64)
                full[:, sl[d - step]] = below.basis
                moved = np.vstack([self._act_var(level, j, full)[:, idx]
                                   for j in range(self.ring.nvars)])
                # m·K_{d-1} in the coordinates of the RREF basis of K_d
                coords = moved[:, list(Kd.pivots)]
                self._check_inside(moved, coords, Kd)
                _, r, piv = rref(coords, self.p)
                free = np.setdiff1d(free, piv)
            out = np.zeros((free.size, width), np.int64)
            out[:, idx] = Kd.basis[free]
            return out

        degs = sorted(sl)
        blocks = pmap(new_generators, degs)
        shifts = np.concatenate([np.full(b.shape[0], d, np.int64)
                                 for d, b in zip(degs, blocks)]) \
            if blocks else np.zeros(0, np.int64)
        gens = np.vstack(blocks) if blocks else np.zeros((0, width), np.int64)
        if i == 0:
            V = gens
        else:
            V = gens.reshape(len(shifts), width // self.ring.dim,
                             self.ring.dim)
            self._check_minimal(V, i)
        self.shifts.append(shifts)
        self.diffs.append(V)
        self.length = i

    def _check_inside(self, moved, coords, Kd):
        """Probe that moved ⊆ K_d by comparing against one random vector."""
        probe = np.random.default_rng(len(Kd.pivots)).integers(
            0, self.p, size=(moved.shape[1], 1))
        lhs = matmul_mod(moved, probe, self.p)
        rhs = matmul_mod(coords, matmul_mod(Kd.basis, probe, self.p), self.p)
        if np.any(lhs != rhs):
            raise InternalInconsistency("m·K is not inside K")

    def _check_minimal(self, V: np.ndarray, i: int):
        if V.size and np.any(V[:, :, 0]):
            raise InternalInconsistency(f"differential d_{i} has a unit entry")

    def _kernels(self, i: int) -> dict[int, Subspace]:
        sl = _slices(self.space_degrees(i))
        prev = self._kernel

        def one(d):
            M = self.slice_matrix(i, d)
            Kd = (kernel_basis(M, self.p) if M.shape[0]
                  else Subspace.full(M.shape[1], self.p))
            r = M.shape[1] - Kd.dim
            expect = prev[d].dim if d in prev else 0
            # exactness: the image of d_i in degree d is all of ker d_{i-1}
            if r != expect:
                raise InternalInconsistency(
                    f"resolution not exact at F_{i - 1} in degree {d}")
            return Kd

        degs = sorted(sl)
        for d, Kd in prev.items():
            if d not in sl and Kd.dim:
                raise InternalInconsistency(
                    f"syzygies in degree {d} were never covered")
        return dict(zip(degs, pmap(one, degs)))

    # -- read-off ------------------------------------------------------------

    @property
    def betti(self) -> list[int]:
        return [len(s) for s in self.shifts]

    def betti_table(self, N: int | None = None) -> "BettiTable":
        N = self.length if N is None else N
        self.extend(N)
        entries: dict[tuple[int, int], int] = {}
        for i in range(N + 1):
            for d, c in zip(*np.unique(self.shifts[i], return_counts=True)):
                entries[(i, int(d))] = int(c)
        return BettiTable(entries, N, self.graded)

    def entry(self, i: int, row: int, col: int) -> RingElement:
        """The ring element in position (row, col) of d_i, i >= 1."""
        return RingElement(self.ring, self.diffs[i][col, row].copy())

    def matrix_text(self, i: int) -> list[list[str]]:
        R = self.ring
        V = self.diffs[i]
        return [[R.format(V[g, k]) for g in range(V.shape[0])]
                for k in range(V.shape[1])]


@dataclass
class BettiTable:
    entries: dict[tuple[int, int], int]
    N: int
    graded: bool = True

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    def total(self, i: int) -> int:
        return sum(c for (h, _), c in self.entries.items() if h == i)

    @property
    def totals(self) -> list[int]:
        return [self.total(i) for i in range(self.N + 1)]

    def is_diagonal(self, shift: int = 0) -> bool:
        return all(j == i + shift for (i, j) in self.entries)

    def rows(self) -> list[dict]:
        return [{"i": i, "j": j, "beta": c}
                for (i, j), c in sorted(self.entries.items())]

    def to_text(self) -> str:
        if not self.entries:
            return "(zero module)"
        lo = min(j - i for i, j in self.entries)
        hi = max(j - i for i, j in self.entries)
        head = "       " + " ".join(f"{i:>5}" for i in range(self.N + 1))
        lines = [head, "total: " + " ".join(f"{t:>5}" for t in self.totals)]
        for r in range(lo, hi + 1):
            vals = [self[(i, i + r)] for i in range(self.N + 1)]
            lines.append(f"{r:>5}: " + " ".join(
                f"{v if v else '.':>5}" for v in vals))
        return "\n".join(lines)


def minimal_resolution(M: FDModule, N: int) -> FreeResolution:
    """Minimal resolution of M through homological degree N (cached on M)."""
    if N < 0:
        raise ValueError("truncation must be non-negative")
    res = cached(M, "resolution", lambda: FreeResolution(M))
    return res.extend(N)


def residue_resolution(R: QuotientRing, N: int) -> FreeResolution:
    """Minimal resolution of k over R (cached on the ring)."""
    k = cached(R, "residue-module", lambda: residue_field(R))
    return minimal_resolution(k, N)


def betti_table(M: FDModule, N: int) -> BettiTable:
    return minimal_resolution(M, N).betti_table(N)


def poincare_coeffs(M: FDModule, N: int) -> list[int]:
    return minimal_resolution(M, N).betti[:N + 1]


# ----------------------------------------------------------------------------
# chain maps


@dataclass
class FreeComplex:
    """A complex of free modules in the array layout of a resolution;
    ``diffs[0]`` holds the images of the level-0 generators in ``module``."""
    ring: QuotientRing
    shifts: list[np.ndarray]
    diffs: list[np.ndarray]
    module: FDModule


def base_change(F: FreeResolution, proj: RingMap, N: int) -> FreeComplex:
    """F ⊗_R S for a surjection R -> S; F must resolve k."""
    F.extend(N)
    S = proj.target
    P = proj.matrix
    diffs = [F.diffs[0].copy()]
    for i in range(1, N + 1):
        V = F.diffs[i]
        flat = matmul_mod(V.reshape(-1, V.shape[2]), P.T, S.p)
        diffs.append(flat.reshape(V.shape[0], V.shape[1], S.dim))
    kS = cached(S, "residue-module", lambda: residue_field(S))
    return FreeComplex(S, F.shifts[:N + 1], diffs, kS)


def _apply_chain(W: np.ndarray, Phi: np.ndarray, ring: QuotientRing
                 ) -> np.ndarray:
    """Apply a map of free modules (Phi: (a, b, D)) to elements W: (n, a, D)."""
    p = ring.p
    D = ring.dim
    n, a, _ = W.shape
    b = Phi.shape[1]
    out = np.zeros((n, b * D), np.int64)
    if n == 0 or a == 0 or b == 0:
        return out.reshape(n, b, D)
    flat = Phi.reshape(-1, D)
    for m in range(D):
        coef = W[:, :, m]
        if not np.any(coef):
            continue
        moved = matmul_mod(flat, ring.mult[m], p).reshape(a, b * D)
        out = (out + matmul_mod(coef, moved, p)) % p
    return out.reshape(n, b, D)


def lift_chain_map(src: FreeComplex | FreeResolution, tgt: FreeResolution,
                   f: np.ndarray, N: int) -> list[np.ndarray]:
    """Lift the module map ``f`` (target.module <- src.module, acting on
    columns) to a chain map src -> tgt through degree N.

    Returns Φ_0..Φ_N with Φ_i of shape (β^src_i, β^tgt_i, D): row g is the
    image of the g-th source generator.  Each system is solved with the
    canonical RREF particular solution, so the output is deterministic.
    """
    tgt.extend(N)
    T = tgt.ring
    D = T.dim
    p = T.p
    graded = tgt.graded
    out = []
    for i in range(N + 1):
        shifts = src.shifts[i] if i < len(src.shifts) else np.zeros(0, int)
        nb = tgt.rank(i)
        Phi = np.zeros((len(shifts), nb, D), np.int64)
        if len(shifts):
            if i == 0:
                targets = matmul_mod(src.diffs[0], f.T, p)
            else:
                targets = _apply_chain(src.diffs[i], out[i - 1], T)
                targets = targets.reshape(len(shifts), -1)
            degs = shifts if graded else np.zeros(len(shifts), np.int64)
            tdeg = tgt.space_degrees(i)
            prev = _slices(tgt.space_degrees(i - 1))
            cur = _slices(tdeg)
            for e in np.unique(degs):
                sel = np.flatnonzero(degs == e)
                rows = prev.get(int(e), np.zeros(0, np.int64))
                cols = cur.get(int(e), np.zeros(0, np.int64))
                rhs = targets[sel]
                outside = np.ones(rhs.shape[1], bool)
                outside[rows] = False
                if np.any(rhs[:, outside]):
                    raise LiftFailure(f"image leaves degree {e} at level {i}")
                if not cols.size:
                    if np.any(rhs):
                        raise LiftFailure(f"nothing to lift onto at level {i}")
                    continue
                A = tgt.slice_matrix(i, int(e))
                try:
                    x = solve(A, rhs[:, rows].T, p)
                except ArithmeticError as exc:
                    raise LiftFailure(
                        f"cannot lift generator images at level {i}") from exc
                flat = np.zeros((sel.size, nb * D), np.int64)
                flat[:, cols] = x.T
                Phi[sel] = flat.reshape(sel.size, nb, D)
        out.append(Phi)
    return out


@dataclass
class TorMap:
    """Maps Tor_i(-,k) for i = 0..N on minimal-generator coordinates."""
    matrices: list[np.ndarray]
    p: int
    ranks: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.ranks = [rank(m, self.p) if m.size else 0 for m in self.matrices]

    def source_dim(self, i: int) -> int:
        return self.matrices[i].shape[1]

    def target_dim(self, i: int) -> int:
        return self.matrices[i].shape[0]

    def injective(self, i: int) -> bool:
        return self.ranks[i] == self.source_dim(i)

    def surjective(self, i: int) -> bool:
        return self.ranks[i] == self.target_dim(i)

    def zero(self, i: int) -> bool:
        return self.ranks[i] == 0

    def pattern(self, kind: str) -> list[bool]:
        test = {"injective": self.injective, "surjective": self.surjective,
                "zero": self.zero}[kind]
        return [test(i) for i in range(len(self.matrices))]


def _reduce_mod_m(Phis: list[np.ndarray], p: int) -> TorMap:
    return TorMap([Phi[:, :, 0].T.copy() for Phi in Phis], p)


def tor_comparison(f: ModuleMap, N: int) -> TorMap:
    """Tor_i(f, k) for i <= N via a lift between minimal resolutions."""
    F = minimal_resolution(f.source, N)
    G = minimal_resolution(f.target, N)
    return _reduce_mod_m(lift_chain_map(F, G, f.matrix, N), f.source.owner.p)


def tor_kk_map(R: QuotientRing, S: QuotientRing, proj: RingMap,
               N: int) -> TorMap:
    """Tor^R_i(k,k) -> Tor^S_i(k,k) for i <= N."""
    F = residue_resolution(R, N)
    G = residue_resolution(S, N)
    src = base_change(F, proj, N)
    return _reduce_mod_m(lift_chain_map(src, G, np.eye(1, dtype=np.int64), N),
                         R.p)


# ----------------------------------------------------------------------------
# linearity defect


@dataclass
class LinearityReport:
    ld: int
    koszul_module: bool
    lin_homology: list[int]
    window: int
    generator_degrees: list[int]


def _linear_part(res: FreeResolution, i: int) -> np.ndarray:
    V = res.diffs[i].copy()
    V[:, :, res.ring.degrees != 1] = 0
    return V


def linearity_defect(M: FDModule, N: int) -> LinearityReport:
    """ld of M seen through the window 1..N.

    ``lin_homology[i]`` is dim H_i(lin F).  ``ld`` is the largest i in the
    window with nonzero homology (0 when there is none), so ``ld == 0``
    means M is a Koszul module as far as degree N can tell.
    """
    if not M.graded:
        raise NotGraded("linearity defect needs a graded module")
    res = minimal_resolution(M, N + 1)
    p = res.p
    lin = [None] + [_linear_part(res, i) for i in range(1, N + 2)]
    hom = [0]
    for i in range(1, N + 1):
        total = 0
        for d in np.unique(res.space_degrees(i)):
            d = int(d)
            a = res.slice_matrix(i, d, lin[i])
            b = res.slice_matrix(i + 1, d, lin[i + 1])
            n = a.shape[1]
            total += n - (rank(a, p) if a.size else 0) \
                - (rank(b, p) if b.size else 0)
        hom.append(total)
    ld = max((i for i in range(1, N + 1) if hom[i]), default=0)
    gdeg = sorted(set(res.shifts[0].tolist()))
    koszul = ld == 0
    if len(gdeg) == 1:
        diag = res.betti_table(N + 1).is_diagonal(gdeg[0])
        if diag != koszul:
            raise InternalInconsistency(
                "diagonal Betti table and acyclic linear part disagree")
    return LinearityReport(ld, koszul, hom, N, gdeg)


# ----------------------------------------------------------------------------
# Tor(k, M) through a resolution of k, for cross-checking


def tor_via_residue(M: FDModule, N: int) -> list[int]:
    """dim Tor_i(k, M) for i <= N, from F ⊗_R M with F resolving k.

    F ⊗ M is graded by shift + module degree, so ranks are taken one
    internal degree at a time (one slice in the ungraded case).
    """
    R = M.owner
    p = R.p
    F = residue_resolution(R, N + 1)
    graded = M.graded and F.graded
    mdeg = M.degrees if graded else np.zeros(M.dim, np.int64)
    acts = M.monomial_actions

    def shifts(i):
        s = F.shifts[i] if 0 <= i <= F.length else np.zeros(0, np.int64)
        return s if graded else np.zeros(len(s), np.int64)

    def blocks(s_all, d):
        out = []
        for s in np.unique(s_all):
            gens = np.flatnonzero(s_all == s)
            basis = np.flatnonzero(mdeg == d - s)
            if basis.size:
                out.append((int(s), gens, basis))
        return out

    def slice_rank(i, d):
        """Rank of d_i ⊗ M in internal degree d."""
        cols = blocks(shifts(i), d)
        rows = blocks(shifts(i - 1), d)
        if not cols or not rows:
            return 0
        nr = sum(g.size * b.size for _, g, b in rows)
        nc = sum(g.size * b.size for _, g, b in cols)
        mat = np.zeros((nr, nc), np.int64)
        V = F.diffs[i]
        c0 = 0
        for s, G, B in cols:
            r0 = 0
            for s2, K, B2 in rows:
                h = r0 + K.size * B2.size
                ms = (np.flatnonzero(R.degrees == s - s2) if graded
                      else np.arange(R.dim))
                if ms.size:
                    sub = V[np.ix_(G, K, ms)]
                    if sub.any():
                        act = acts[np.ix_(ms, B2, B)]
                        blk = np.einsum("gkm,mab->kagb", sub, act) % p
                        mat[r0:h, c0:c0 + G.size * B.size] = blk.reshape(
                            h - r0, -1)
                r0 = h
            c0 += G.size * B.size
        return rank(mat, p)

    def total_rank(i):
        if i < 1 or i > N + 1:
            return 0
        degs = np.unique(_flat_degrees(shifts(i), mdeg)) if M.dim else []
        return sum(slice_rank(i, int(d)) for d in degs)

    ranks = [total_rank(i) for i in range(N + 2)]
    return [F.rank(i) * M.dim - ranks[i] - ranks[i + 1]
            for i in range(N + 1)]
