"""Spatial grid of cells and cell-to-codeword encodings.

A grid holds n cells with centers in the unit square and per-cell alert
probabilities.  An encoding is an injection of cell ids into k-bit
codewords; when n is not a power of two the 2^k - n unassigned codewords
are dummies, usable as don't-cares during token minimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, IO, List, Optional, Sequence, Tuple

from .gray import Codeword


@dataclass(frozen=True)
class Cell:
    id: int
    x: float
    y: float
    p: float


class Grid:
    """Cells with dense ids [0, n), unit-square centers and probabilities."""

    def __init__(self, cells: Sequence[Cell]):
        if not cells:
            raise ValueError("grid needs at least one cell")
        if [c.id for c in cells] != list(range(len(cells))):
            raise ValueError("cell ids must be dense and ordered 0..n-1")
        for c in cells:
            if not 0.0 <= c.p <= 1.0:
                raise ValueError(f"cell {c.id} probability {c.p} outside [0, 1]")
        self.cells: Tuple[Cell, ...] = tuple(cells)

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def k(self) -> int:
        """Codeword width needed for a minimal encoding."""
        return max(1, math.ceil(math.log2(self.n))) if self.n > 1 else 1

    def probabilities(self) -> List[float]:
        return [c.p for c in self.cells]

    def centers(self) -> List[Tuple[float, float]]:
        return [(c.x, c.y) for c in self.cells]

    def with_probabilities(self, probs: Sequence[float]) -> "Grid":
        """Same geometry, new probability vector."""
        if len(probs) != self.n:
            raise ValueError("probability vector length mismatch")
        return Grid([Cell(c.id, c.x, c.y, float(p)) for c, p in zip(self.cells, probs)])

    @classmethod
    def regular(cls, n: int, probs: Optional[Sequence[float]] = None) -> "Grid":
        """Near-square lattice of n cells over the unit square, row-major
        from the top-left."""
        if n < 1:
            raise ValueError("n must be >= 1")
        cols = math.ceil(math.sqrt(n))
        rows = math.ceil(n / cols)
        if probs is None:
            probs = [0.5] * n
        if len(probs) != n:
            raise ValueError("probability vector length mismatch")
        cells = []
        for i in range(n):
            r, c = divmod(i, cols)
            cells.append(Cell(
                id=i,
                x=(c + 0.5) / cols,
                y=1.0 - (r + 0.5) / rows,
                p=float(probs[i]),
            ))
        return cls(cells)


@dataclass(frozen=True)
class GridEncoding:
    """Injection of cell ids into k-bit codewords.

    Minimal-width encodings have k = ceil(log2 n); the hierarchical
    baseline pads to full quadtree levels and may use a larger k.
    """

    n: int
    k: int
    forward: Tuple[int, ...]                       # cell id -> codeword value
    algorithm: str = "unknown"
    _reverse: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.forward) != self.n:
            raise ValueError("forward map must cover every cell")
        min_k = max(1, math.ceil(math.log2(self.n))) if self.n > 1 else 1
        if self.k < min_k:
            raise ValueError("codeword width too small for cell count")
        reverse: Dict[int, int] = {}
        for cell_id, value in enumerate(self.forward):
            if not 0 <= value < (1 << self.k):
                raise ValueError(f"codeword {value} out of range for width {self.k}")
            if value in reverse:
                raise ValueError(f"codeword {value} assigned twice")
            reverse[value] = cell_id
        object.__setattr__(self, "_reverse", reverse)

    @property
    def space(self) -> int:
        return 1 << self.k

    def codeword(self, cell_id: int) -> Codeword:
        return Codeword(self.forward[cell_id], self.k)

    def value(self, cell_id: int) -> int:
        return self.forward[cell_id]

    def cell_at(self, value: int) -> Optional[int]:
        """Cell mapped to a codeword value, or None for a dummy."""
        return self._reverse.get(value)

    def dummies(self) -> List[int]:
        """Codeword values that map to no cell, ascending."""
        return [v for v in range(self.space) if v not in self._reverse]

    @property
    def dummy_count(self) -> int:
        return self.space - self.n


def write_encoding(fp: IO[str], enc: GridEncoding, params: str = "", seed: Optional[int] = None) -> None:
    """One record per line: cell id, TAB, msb-first codeword."""
    fp.write(f"# n={enc.n} k={enc.k} algorithm={enc.algorithm}"
             f" params={params or '-'} seed={'-' if seed is None else seed}\n")
    for cell_id in range(enc.n):
        fp.write(f"{cell_id}\t{enc.codeword(cell_id)}\n")


def read_encoding(fp: IO[str]) -> GridEncoding:
    header = fp.readline()
    if not header.startswith("#"):
        raise ValueError("encoding file must start with a header line")
    meta = dict(item.split("=", 1) for item in header[1:].split())
    n = int(meta["n"])
    k = int(meta["k"])
    forward: List[int] = [-1] * n
    for line in fp:
        if not line.strip():
            continue
        cell_text, word = line.split("\t")
        forward[int(cell_text)] = int(word.strip(), 2)
    if any(v < 0 for v in forward):
        raise ValueError("encoding file is missing cells")
    return GridEncoding(n=n, k=k, forward=tuple(forward),
                        algorithm=meta.get("algorithm", "unknown"))
