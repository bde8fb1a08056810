"""Smith normal form over Euclidean ground rings.

The reduction works on a sparse copy of the matrix (row dictionaries plus a
column index) and replays every elementary operation on whichever change of
basis matrices the caller asked for.  Optional per-row and per-column quantum
degrees turn it into a graded reduction: every operation is checked to be
homogeneous, and the degrees of the new bases are returned with the result.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from sympy.polys.matrices import DomainMatrix

from eqkhovanov.core.coeff import (
    GroundRing,
    HomogeneityError,
    RingElement,
    SparseMatrix,
)

logger = logging.getLogger(__name__)


@dataclass
class SmithForm:
    """S = P*M*Q with S diagonal; inverses returned alongside."""
    ring: GroundRing
    S: SparseMatrix
    pivots: List[RingElement]
    P: Optional[SparseMatrix] = None
    P_inv: Optional[SparseMatrix] = None
    Q: Optional[SparseMatrix] = None
    Q_inv: Optional[SparseMatrix] = None
    row_degrees: Optional[List[int]] = None
    col_degrees: Optional[List[int]] = None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def invariant_factors(self) -> List[RingElement]:
        return list(self.pivots)


def _axpy(target: Dict[int, RingElement], source: Dict[int, RingElement], f: RingElement):
    """target += f * source, dropping zeros."""
    for k, v in source.items():
        new = target.get(k, 0) + f * v if k in target else f * v
        if new:
            target[k] = new
        else:
            target.pop(k, None)


def _scale(target: Dict[int, RingElement], u: RingElement):
    for k in list(target):
        target[k] = target[k] * u


class _Reducer:
    def __init__(self, M: SparseMatrix, track_left: bool, track_right: bool,
                 row_degrees: Optional[Sequence[int]], col_degrees: Optional[Sequence[int]],
                 require_divisibility: bool):
        ring = M.ring
        self.ring = ring
        self.nrows, self.ncols = M.shape
        self.rows: Dict[int, Dict[int, RingElement]] = {r: M.row(r) for r in range(self.nrows)}
        self.cols: Dict[int, Set[int]] = {c: set() for c in range(self.ncols)}
        for r, c, _ in M.entries():
            self.cols[c].add(r)
        self.track_left = track_left
        self.track_right = track_right
        one = ring.one
        if track_left:
            self.P_rows = {r: {r: one} for r in range(self.nrows)}
            self.Pinv_cols = {r: {r: one} for r in range(self.nrows)}
        if track_right:
            self.Q_cols = {c: {c: one} for c in range(self.ncols)}
            self.Qinv_rows = {c: {c: one} for c in range(self.ncols)}
        self.graded = row_degrees is not None
        self.row_deg = list(row_degrees) if row_degrees is not None else None
        self.col_deg = list(col_degrees) if col_degrees is not None else None
        self.require_divisibility = require_divisibility

    # -- elementary operations -------------------------------------------

    def _check(self, f: RingElement, expected: int, what: str):
        if not self.graded or not f:
            return
        if not self.ring.is_homogeneous(f) or self.ring.degree(f) != expected:
            raise HomogeneityError(
                f"{what} factor {self.ring.to_str(f)} is not homogeneous of degree {expected}"
            )

    def row_add(self, r1: int, r2: int, f: RingElement):
        """row r1 += f * row r2"""
        if self.graded:
            self._check(f, self.row_deg[r2] - self.row_deg[r1], "row operation")
        target = self.rows[r1]
        for c, v in self.rows[r2].items():
            new = target.get(c, self.ring.zero) + f * v
            if new:
                target[c] = new
                self.cols[c].add(r1)
            else:
                target.pop(c, None)
                self.cols[c].discard(r1)
        if self.track_left:
            _axpy(self.P_rows[r1], self.P_rows[r2], f)
            _axpy(self.Pinv_cols[r2], self.Pinv_cols[r1], -f)

    def col_add(self, c1: int, c2: int, f: RingElement):
        """col c1 += f * col c2"""
        if self.graded:
            self._check(f, self.col_deg[c1] - self.col_deg[c2], "column operation")
        for r in list(self.cols[c2]):
            row = self.rows[r]
            new = row.get(c1, self.ring.zero) + f * row[c2]
            if new:
                row[c1] = new
                self.cols[c1].add(r)
            else:
                row.pop(c1, None)
                self.cols[c1].discard(r)
        if self.track_right:
            _axpy(self.Q_cols[c1], self.Q_cols[c2], f)
            _axpy(self.Qinv_rows[c2], self.Qinv_rows[c1], -f)

    def row_scale(self, r: int, u: RingElement):
        u_inv = self.ring.unit_inverse(u)
        _scale(self.rows[r], u)
        if self.track_left:
            _scale(self.P_rows[r], u)
            _scale(self.Pinv_cols[r], u_inv)

    def col_scale(self, c: int, u: RingElement):
        u_inv = self.ring.unit_inverse(u)
        for r in self.cols[c]:
            self.rows[r][c] = self.rows[r][c] * u
        if self.track_right:
            _scale(self.Q_cols[c], u)
            _scale(self.Qinv_rows[c], u_inv)

    # -- pivoting -----------------------------------------------------------

    def choose_pivot(self, scan_rows: List[int]) -> Optional[Tuple[int, int]]:
        best = None
        unit_norm = self.ring.unit_norm
        for r in scan_rows:
            row = self.rows[r]
            for c in sorted(row):
                key = (self.ring.norm(row[c]), r, c)
                if best is None or key < best:
                    best = key
                    if key[0] == unit_norm:
                        return best[1], best[2]
        return None if best is None else (best[1], best[2])

    def reduce_at(self, r: int, c: int) -> Tuple[int, int]:
        """Clear row r and column c around the pivot; returns the final pivot."""
        ring = self.ring
        while True:
            p = self.rows[r][c]
            for r2 in sorted(self.cols[c]):
                if r2 == r:
                    continue
                q, _ = ring.divmod(self.rows[r2][c], p)
                if q:
                    self.row_add(r2, r, -q)
            for c2 in sorted(self.rows[r]):
                if c2 == c:
                    continue
                q, _ = ring.divmod(self.rows[r][c2], p)
                if q:
                    self.col_add(c2, c, -q)
            leftovers = [(ring.norm(self.rows[r2][c]), r2, c) for r2 in self.cols[c] if r2 != r]
            leftovers += [(ring.norm(v), r, c2) for c2, v in self.rows[r].items() if c2 != c]
            if not leftovers:
                if self.require_divisibility and not ring.is_unit(p):
                    witness = self._non_multiple(r, c, p)
                    if witness is not None:
                        self.row_add(r, witness, ring.one)
                        continue
                return r, c
            _, r, c = min(leftovers)

    def _non_multiple(self, r: int, c: int, p: RingElement) -> Optional[int]:
        """An active row holding an entry that p does not divide."""
        for r2 in sorted(self.active_rows):
            if r2 == r:
                continue
            if self.graded and self.row_deg[r2] != self.row_deg[r]:
                continue
            for v in self.rows[r2].values():
                if not self.ring.divides(p, v):
                    return r2
        return None

    def run(self) -> List[Tuple[int, int]]:
        self.active_rows = set(range(self.nrows))
        pivots: List[Tuple[int, int]] = []
        scan = [r for r in range(self.nrows) if self.rows[r]]
        while True:
            scan = [r for r in scan if r in self.active_rows and self.rows[r]]
            choice = self.choose_pivot(scan)
            if choice is None:
                break
            r, c = self.reduce_at(*choice)
            u = self.ring.normalization_unit(self.rows[r][c])
            if u != self.ring.one:
                if self.track_left or not self.track_right:
                    self.row_scale(r, u)
                else:
                    self.col_scale(c, u)
            pivots.append((r, c))
            self.active_rows.discard(r)
        return pivots


def smith_normal_form(
    M: SparseMatrix,
    track_left: bool = True,
    track_right: bool = True,
    row_degrees: Optional[Sequence[int]] = None,
    col_degrees: Optional[Sequence[int]] = None,
) -> SmithForm:
    """Smith normal form with change of basis matrices.

    Args:
        M: matrix over a Euclidean GroundRing
        track_left: also return P and P^-1
        track_right: also return Q and Q^-1
        row_degrees: quantum degrees of the target basis (graded mode)
        col_degrees: quantum degrees of the source basis (graded mode)

    Returns:
        SmithForm with S = P*M*Q diagonal.  Ungraded reductions satisfy
        d1 | d2 | ...; graded ones keep divisibility inside each quantum
        block and return the degrees of the new bases.

    Raises:
        NonEuclideanRingError: if the ring has no Euclidean division
        HomogeneityError: if a graded reduction meets an inhomogeneous step
    """
    ring = M.ring
    ring.require_euclidean("smith_normal_form")
    if (row_degrees is None) != (col_degrees is None):
        raise ValueError("row_degrees and col_degrees go together")
    red = _Reducer(M, track_left, track_right, row_degrees, col_degrees,
                   require_divisibility=True)
    pivot_cells = red.run()
    rank = len(pivot_cells)
    pivot_rows = [r for r, _ in pivot_cells]
    pivot_cols = [c for _, c in pivot_cells]
    taken_r, taken_c = set(pivot_rows), set(pivot_cols)
    row_order = pivot_rows + [r for r in range(red.nrows) if r not in taken_r]
    col_order = pivot_cols + [c for c in range(red.ncols) if c not in taken_c]
    pivots = [red.rows[r][c] for r, c in pivot_cells]

    S = SparseMatrix(ring, red.nrows, red.ncols, {k: {k: pivots[k]} for k in range(rank)})
    result = SmithForm(ring=ring, S=S, pivots=pivots)
    if track_left:
        result.P = SparseMatrix(ring, red.nrows, red.nrows,
                                {k: red.P_rows[r] for k, r in enumerate(row_order)})
        result.P_inv = SparseMatrix.from_entries(
            ring, red.nrows, red.nrows,
            ((i, k, v) for k, r in enumerate(row_order) for i, v in red.Pinv_cols[r].items()),
        )
    if track_right:
        result.Q = SparseMatrix.from_entries(
            ring, red.ncols, red.ncols,
            ((i, k, v) for k, c in enumerate(col_order) for i, v in red.Q_cols[c].items()),
        )
        result.Q_inv = SparseMatrix(ring, red.ncols, red.ncols,
                                    {k: red.Qinv_rows[c] for k, c in enumerate(col_order)})
    if row_degrees is not None:
        result.row_degrees = [row_degrees[r] for r in row_order]
        result.col_degrees = [col_degrees[c] for c in col_order]
    logger.debug(f"SNF {M.shape} over {ring.name}: rank {rank}")
    return result


def is_smith_normal_form(S: SparseMatrix) -> bool:
    """Diagonal with each diagonal entry dividing the next."""
    ring = S.ring
    diag = []
    for r, c, v in S.entries():
        if r != c:
            return False
        diag.append((r, v))
    for k, (r, _) in enumerate(diag):
        if r != k:
            return False
    values = [v for _, v in diag]
    return all(ring.divides(a, b) for a, b in zip(values, values[1:]))


def determinant_divisors(M: SparseMatrix) -> List[RingElement]:
    """D_k = gcd of all k x k minors, k = 1..min(shape), normalized.

    Brute force; meant as an oracle for small matrices.
    """
    ring = M.ring
    dense = M.to_dense()
    out = []
    for k in range(1, min(M.shape) + 1):
        g = ring.zero
        for rows in itertools.combinations(range(M.nrows), k):
            for cols in itertools.combinations(range(M.ncols), k):
                block = [[dense[r][c] for c in cols] for r in rows]
                minor = DomainMatrix(block, (k, k), ring.domain).det()
                if not minor:
                    continue
                if ring.field_spec.is_field and not ring.names:
                    g = ring.one
                else:
                    g = ring.gcd(g, minor) if g else ring.normalize(minor)
        out.append(g)
    return out


def invariant_factors_by_minors(M: SparseMatrix) -> List[RingElement]:
    """Invariant factors d_k = D_k / D_{k-1} from the determinant divisors."""
    ring = M.ring
    factors = []
    previous = ring.one
    for D in determinant_divisors(M):
        if not D:
            break
        factors.append(ring.normalize(ring.exquo(D, previous)))
        previous = D
    return factors
