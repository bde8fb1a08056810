"""Gaussian elimination of unit entries in a chain complex.

A unit entry phi of d_i: C_i -> C_{i+1}, from generator b to generator a,
splits off the contractible piece b -> a. What remains is homotopy
equivalent to the original complex, with differential eps - gamma phi^-1 delta
on the surviving generators (gamma the rest of column b, delta the rest of
row a). The projection onto the small complex and the inclusion back are
recorded step by step, so cycles can be pushed down and homology
generators lifted up again.

Khovanov differentials over F[h] or Z are mostly units, so the complex
left for the Smith normal form is a small fraction of the cube.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

from eqkhovanov.core.coeff import GroundRing, RingElement, SparseMatrix

logger = logging.getLogger(__name__)

Vector = Dict[int, RingElement]


@dataclass
class _Step:
    """One cancelled pair: column b of d_i against row a."""
    i: int
    a: int
    b: int
    phi_inv: RingElement
    gamma: Vector
    delta: Vector


class Elimination:
    """A complex shrunk by cancelling unit entries, with its transfer maps.

    Indices in :meth:`push` input and :meth:`lift` output are generator
    indices of the original complex; the small complex is addressed by
    position in ``surviving[i]``.
    """

    def __init__(self, ring: GroundRing, q_degrees: Dict[int, List[int]],
                 differentials: Dict[int, SparseMatrix]):
        self.ring = ring
        self._q = {i: list(qs) for i, qs in q_degrees.items()}
        self.alive: Dict[int, set] = {i: set(range(len(qs))) for i, qs in q_degrees.items()}
        # rows[i][r][c] and cols[i][c][r] both hold entry (r, c) of d_i
        self.rows: Dict[int, Dict[int, Vector]] = {}
        self.cols: Dict[int, Dict[int, Vector]] = {}
        for i, d in differentials.items():
            rows, cols = {}, {}
            for r, c, v in d.entries():
                rows.setdefault(r, {})[c] = v
                cols.setdefault(c, {})[r] = v
            self.rows[i], self.cols[i] = rows, cols
        self.steps: List[_Step] = []
        self.surviving: Dict[int, List[int]] = {}

    # -- bookkeeping --------------------------------------------------------

    def _set(self, i: int, r: int, c: int, value: RingElement):
        if value:
            self.rows[i].setdefault(r, {})[c] = value
            self.cols[i].setdefault(c, {})[r] = value
        else:
            row = self.rows[i].get(r)
            if row is not None:
                row.pop(c, None)
                if not row:
                    del self.rows[i][r]
            col = self.cols[i].get(c)
            if col is not None:
                col.pop(r, None)
                if not col:
                    del self.cols[i][c]

    def _drop_row(self, i: int, r: int):
        if i not in self.rows:
            return
        for c in self.rows[i].pop(r, {}):
            col = self.cols[i][c]
            col.pop(r, None)
            if not col:
                del self.cols[i][c]

    def _drop_col(self, i: int, c: int):
        if i not in self.cols:
            return
        for r in self.cols[i].pop(c, {}):
            row = self.rows[i][r]
            row.pop(c, None)
            if not row:
                del self.rows[i][r]

    def _cancel(self, i: int, a: int, b: int):
        R = self.ring
        phi_inv = R.unit_inverse(self.rows[i][a][b])
        gamma = {r: v for r, v in self.cols[i][b].items() if r != a}
        delta = {c: v for c, v in self.rows[i][a].items() if c != b}
        zero = R.zero
        for r, g in gamma.items():
            f = g * phi_inv
            for c, dv in delta.items():
                self._set(i, r, c, self.rows[i].get(r, {}).get(c, zero) - f * dv)
        self._drop_row(i, a)
        self._drop_col(i, b)
        self._drop_row(i - 1, b)
        self._drop_col(i + 1, a)
        self.alive[i].discard(b)
        self.alive[i + 1].discard(a)
        self.steps.append(_Step(i, a, b, phi_inv, gamma, delta))

    def _unit_pivot(self, i: int, b: int):
        """Row of a unit entry in column b, preferring short rows."""
        best = None
        for a, v in self.cols[i].get(b, {}).items():
            if self.ring.is_unit(v):
                cost = len(self.rows[i][a])
                if best is None or cost < best[0]:
                    best = (cost, a)
        return None if best is None else best[1]

    def run(self) -> "Elimination":
        for i in sorted(self.rows):
            progress = True
            while progress:
                progress = False
                # short columns first keeps the fill-in small
                for b in sorted(self.cols[i], key=lambda c: len(self.cols[i].get(c, ()))):
                    if b not in self.cols[i]:
                        continue
                    a = self._unit_pivot(i, b)
                    if a is not None:
                        self._cancel(i, a, b)
                        progress = True
        self.surviving = {i: sorted(alive) for i, alive in self.alive.items()}
        before = sum(len(qs) for qs in self._q.values())
        after = sum(len(s) for s in self.surviving.values())
        logger.debug(f"Elimination: {len(self.steps)} cancellations, {before} -> {after} generators")
        return self

    # -- the small complex ----------------------------------------------------

    @property
    def degrees(self) -> List[int]:
        return sorted(i for i, s in self.surviving.items() if s)

    def rank(self, i: int) -> int:
        return len(self.surviving.get(i, ()))

    def q_degrees(self, i: int) -> List[int]:
        return [self._q[i][k] for k in self.surviving.get(i, ())]

    def differential(self, i: int) -> SparseMatrix:
        """d_i of the small complex in surviving positions."""
        src = {k: p for p, k in enumerate(self.surviving.get(i, ()))}
        dst = {k: p for p, k in enumerate(self.surviving.get(i + 1, ()))}
        rows = {}
        for r, row in self.rows.get(i, {}).items():
            rows[dst[r]] = {src[c]: v for c, v in row.items()}
        return SparseMatrix(self.ring, len(dst), len(src), rows)

    # -- transfer maps ----------------------------------------------------------

    def push(self, i: int, coords: Vector) -> Vector:
        """Project a chain of degree i onto the small complex (surviving positions)."""
        R = self.ring
        z = dict(coords)
        for st in self.steps:
            if st.i == i:
                z.pop(st.b, None)
            elif st.i + 1 == i:
                ya = z.pop(st.a, None)
                if ya:
                    f = -(st.phi_inv * ya)
                    for r, g in st.gamma.items():
                        value = z.get(r, R.zero) + f * g
                        if value:
                            z[r] = value
                        else:
                            z.pop(r, None)
        position = {k: p for p, k in enumerate(self.surviving.get(i, ()))}
        return {position[k]: v for k, v in z.items() if v}

    def lift(self, i: int, coords: Vector) -> Vector:
        """Include a chain of the small complex (surviving positions) into degree i."""
        R = self.ring
        survivors = self.surviving.get(i, [])
        z = {survivors[p]: v for p, v in coords.items() if v}
        for st in reversed(self.steps):
            if st.i != i:
                continue
            acc = R.zero
            for c, dv in st.delta.items():
                x = z.get(c)
                if x:
                    acc = acc + dv * x
            if acc:
                z[st.b] = -(st.phi_inv * acc)
        return z


def eliminate(ring: GroundRing, q_degrees: Dict[int, List[int]],
              differentials: Dict[int, SparseMatrix]) -> Elimination:
    """Cancel unit entries degree by degree until none is left."""
    return Elimination(ring, q_degrees, differentials).run()
