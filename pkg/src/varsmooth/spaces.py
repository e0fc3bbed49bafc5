"""Finite-dimensional real vectors, block vectors and seeded randomness."""

from dataclasses import dataclass
from math import prod

import numpy as np


class ShapeError(ValueError):
    """Block structures of two operands do not match."""


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


@dataclass(frozen=True)
class Shape:
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ParameterError(f"dims must be positive, got {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def size(self):
        return prod(self.dims)

    def __repr__(self):
        return f"Shape{self.dims}"


class BlockVector:
    """An element of a product of real spaces, one float64 array per factor.

    Treated as a value: operations return new vectors and never write into
    the arrays of their operands.
    """

    __slots__ = ("blocks",)
    # let numpy scalars defer to __rmul__ instead of broadcasting over us
    __array_ufunc__ = None

    def __init__(self, *blocks):
        if len(blocks) == 1 and isinstance(blocks[0], (list, tuple)):
            blocks = tuple(blocks[0])
        if not blocks:
            raise ShapeError("a BlockVector needs at least one block")
        self.blocks = tuple(np.asarray(b, dtype=np.float64) for b in blocks)

    @classmethod
    def zeros(cls, space):
        return cls([np.zeros(s.dims) for s in space])

    @property
    def space(self):
        return tuple(Shape(b.shape if b.ndim else (1,)) for b in self.blocks)

    @property
    def size(self):
        return sum(b.size for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    def __iter__(self):
        return iter(self.blocks)

    def flat(self):
        """All entries concatenated into one 1-D array (a copy)."""
        return np.concatenate([b.ravel() for b in self.blocks])

    def copy(self):
        return BlockVector([b.copy() for b in self.blocks])

    def _check(self, other):
        if len(self.blocks) != len(other.blocks) or any(
            a.shape != b.shape for a, b in zip(self.blocks, other.blocks)
        ):
            raise ShapeError(
                f"block structure mismatch: {[a.shape for a in self.blocks]} "
                f"vs {[b.shape for b in other.blocks]}"
            )

    def __add__(self, other):
        self._check(other)
        return BlockVector([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return BlockVector([a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return BlockVector([-a for a in self.blocks])

    def __mul__(self, c):
        return BlockVector([c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return BlockVector([a / c for a in self.blocks])

    def allclose(self, other, **kw):
        self._check(other)
        return all(np.allclose(a, b, **kw) for a, b in zip(self.blocks, other.blocks))

    def array_equal(self, other):
        return len(self.blocks) == len(other.blocks) and all(
            np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)
        )

    def __repr__(self):
        shapes = ", ".join(str(b.shape) for b in self.blocks)
        return f"BlockVector({shapes})"


def as_block(x):
    """Wrap an array (or pass through a BlockVector)."""
    return x if isinstance(x, BlockVector) else BlockVector(x)


def dot(a, b):
    a._check(b)
    return float(sum(np.vdot(x, y) for x, y in zip(a.blocks, b.blocks)))


def norm2(a):
    return float(np.sqrt(sum(np.vdot(x, x) for x in a.blocks)))


def lincomb(alpha, a, beta, b):
    a._check(b)
    return BlockVector([alpha * x + beta * y for x, y in zip(a.blocks, b.blocks)])


class RngStream:
    """Seeded Philox-4x64 counter-based stream.

    Uniform doubles take the top 53 bits of each raw 64-bit word, and normal
    variates come from Box-Muller on those uniforms, so the draw sequence is
    a pure function of the seed on every platform. ``state`` / ``from_state``
    serialize the position in the stream.
    """

    algorithm = "philox4x64"

    def __init__(self, seed=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._bitgen = np.random.Philox(self.seed)

    @property
    def state(self):
        return {"seed": self.seed, "bit_generator": self._bitgen.state}

    @classmethod
    def from_state(cls, state):
        rng = cls(state["seed"])
        rng._bitgen.state = state["bit_generator"]
        return rng

    def spawn(self, index):
        """An independent stream derived from this one's seed and ``index``."""
        mixed = np.random.SeedSequence([self.seed, int(index)]).generate_state(1, np.uint64)[0]
        return RngStream(int(mixed))

    def raw(self, size):
        return self._bitgen.random_raw(size)

    def uniform(self, size=None):
        """Doubles in [0, 1)."""
        n = 1 if size is None else int(np.prod(size))
        words = self._bitgen.random_raw(n)
        u = (words >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
        return float(u[0]) if size is None else u.reshape(size)

    def normal(self, size):
        """Standard normal draws via Box-Muller (both branches used)."""
        n = int(np.prod(size))
        pairs = (n + 1) // 2
        u1 = 1.0 - self.uniform(pairs)  # (0, 1], keeps the log finite
        u2 = self.uniform(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n].reshape(size)


def gaussian(shape, sigma, rng):
    if sigma < 0:
        raise ParameterError(f"sigma must be nonnegative, got {sigma}")
    space = (shape,) if isinstance(shape, Shape) else tuple(shape)
    return BlockVector([sigma * rng.normal(s.dims) for s in space])
