"""Edge colourings of complete bipartite hosts K_{L,R}."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidColourError, InvalidSizeError


@dataclass(frozen=True, eq=False)
class HostColouring:
    """Colour matrix ``colour[u, v]`` in ``1..r`` for left ``u`` and right ``v`` (0-based).

    Host vertex ids: left ``u`` is ``u``, right ``v`` is ``L + v``.
    """

    left_size: int
    right_size: int
    colour_count: int
    colour: np.ndarray

    def __post_init__(self):
        mat = np.array(self.colour, dtype=np.int8).reshape(self.left_size, self.right_size)
        if mat.size and (mat.min() < 1 or mat.max() > self.colour_count):
            raise InvalidColourError(f"colours must lie in 1..{self.colour_count}")
        mat.setflags(write=False)
        object.__setattr__(self, "colour", mat)

    def __eq__(self, other):
        if not isinstance(other, HostColouring):
            return NotImplemented
        return (
            self.left_size == other.left_size
            and self.right_size == other.right_size
            and self.colour_count == other.colour_count
            and np.array_equal(self.colour, other.colour)
        )

    def __hash__(self):
        return hash((self.left_size, self.right_size, self.colour_count, self.colour.tobytes()))

    @property
    def L(self) -> int:
        return self.left_size

    @property
    def R(self) -> int:
        return self.right_size

    @property
    def r(self) -> int:
        return self.colour_count

    def host_id(self, side: int, index: int) -> int:
        return index if side == 0 else self.left_size + index

    def side_of(self, vid: int) -> tuple[int, int]:
        if 0 <= vid < self.left_size:
            return 0, vid
        if self.left_size <= vid < self.left_size + self.right_size:
            return 1, vid - self.left_size
        raise IndexError(f"host vertex {vid} out of range")

    def mask(self, s: int) -> np.ndarray:
        """Boolean biadjacency of colour ``s``."""
        check_colour(self, s)
        return self.colour == s


def check_colour(c: HostColouring, s: int) -> None:
    if not 1 <= s <= c.colour_count:
        raise InvalidColourError(f"colour {s} not in 1..{c.colour_count}")


def monochromatic(L: int, R: int, r: int = 3, s: int = 1) -> HostColouring:
    return HostColouring(L, R, r, np.full((L, R), s, dtype=np.int8))


def extremal_three_split(n: int) -> HostColouring:
    """Three-part split of the right class: every edge at a vertex of part i gets colour i.

    Host is K_{N,N} with N = 3(n/2 - 1); no monochromatic connected subgraph
    reaches n/2 right vertices.
    """
    if n % 2 or n < 2:
        raise InvalidSizeError(f"extremal_three_split needs even n >= 2, got {n}")
    part = n // 2 - 1
    N = 3 * part
    row = np.repeat(np.arange(1, 4, dtype=np.int8), part)
    return HostColouring(N, N, 3, np.tile(row, (N, 1)))


def random_colouring(N: int, r: int, seed: int) -> HostColouring:
    if N < 1 or r < 1:
        raise InvalidSizeError("random_colouring needs N >= 1 and r >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return HostColouring(N, N, r, rng.integers(1, r + 1, size=(N, N), dtype=np.int8))


def colour_subgraph(c: HostColouring, s: int) -> frozenset:
    """Pairs ``(u, v)`` (0-based side indices) carrying colour ``s``."""
    mat = c.mask(s)
    return frozenset((int(u), int(v)) for u, v in zip(*np.nonzero(mat)))


# -- text format ---------------------------------------------------------------


def write_colouring(c: HostColouring) -> str:
    lines = [f"bipcol {c.L} {c.R} {c.r}"]
    for u in range(c.L):
        for v in range(c.R):
            lines.append(f"{u + 1} {v + 1} {int(c.colour[u, v])}")
    return "\n".join(lines) + "\n"


def read_colouring(text: str) -> HostColouring:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    lines = [ln for ln in lines if not ln.startswith("certificate ")]
    if not lines:
        raise FormatError("empty colouring file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "bipcol":
        raise FormatError(f"bad colouring header {lines[0]!r}")
    L, R, r = (int(x) for x in head[1:])
    mat = np.zeros((L, R), dtype=np.int8)
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"bad colouring line {ln!r}")
        u, v, col = (int(x) for x in parts)
        if not (1 <= u <= L and 1 <= v <= R):
            raise FormatError(f"pair ({u}, {v}) out of range")
        if not 1 <= col <= r:
            raise FormatError(f"colour {col} out of range at ({u}, {v})")
        if mat[u - 1, v - 1]:
            raise FormatError(f"duplicate pair ({u}, {v})")
        mat[u - 1, v - 1] = col
    if L * R and mat.min() == 0:
        u, v = np.argwhere(mat == 0)[0]
        raise FormatError(f"missing pair ({u + 1}, {v + 1})")
    return HostColouring(L, R, r, mat)
