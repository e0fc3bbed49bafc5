"""Matrix-free linear operators on block vectors."""

from math import sqrt

import numpy as np

from . import kernels
from .spaces import BlockVector, ParameterError, RngStream, Shape, ShapeError, norm2


def _space(spec):
    if isinstance(spec, Shape):
        return (spec,)
    return tuple(s if isinstance(s, Shape) else Shape(s) for s in spec)


class LinearOperator:
    """A linear map given by a forward and an adjoint callable.

    ``apply`` and ``adjoint_apply`` take and return :class:`BlockVector`.
    ``norm_bound``, when not ``None``, is an upper bound on the operator norm
    with respect to the Euclidean norms of domain and codomain.
    """

    def __init__(self, domain, codomain, apply, adjoint_apply, norm_bound=None, name="op"):
        self.domain = _space(domain)
        self.codomain = _space(codomain)
        self._apply = apply
        self._adjoint = adjoint_apply
        if norm_bound is not None and norm_bound < 0:
            raise ParameterError("norm_bound must be nonnegative")
        self.norm_bound = norm_bound
        self.name = name

    def _check_in(self, x, space):
        if len(x.blocks) != len(space) or any(
            b.shape != s.dims for b, s in zip(x.blocks, space)
        ):
            raise ShapeError(
                f"{self.name}: expected blocks {[s.dims for s in space]}, "
                f"got {[b.shape for b in x.blocks]}"
            )

    def apply(self, x):
        self._check_in(x, self.domain)
        return self._apply(x)

    def adjoint_apply(self, y):
        self._check_in(y, self.codomain)
        return self._adjoint(y)

    __call__ = apply

    @property
    def adjoint(self):
        return LinearOperator(
            self.codomain, self.domain, self._adjoint, self._apply,
            self.norm_bound, name=f"{self.name}*",
        )

    def __rmul__(self, c):
        c = float(c)
        bound = None if self.norm_bound is None else abs(c) * self.norm_bound
        return LinearOperator(
            self.domain, self.codomain,
            lambda x: c * self._apply(x), lambda y: c * self._adjoint(y),
            bound, name=f"{c}*{self.name}",
        )

    def __repr__(self):
        dom = [s.dims for s in self.domain]
        cod = [s.dims for s in self.codomain]
        return f"<{self.name}: {dom} -> {cod}, norm_bound={self.norm_bound}>"


def _single(fn):
    return lambda x: BlockVector(fn(x.blocks[0]))


def identity(shape):
    space = _space(shape)
    return LinearOperator(space, space, lambda x: x, lambda y: y, 1.0, name="Id")


def matrix_operator(matrix):
    """Dense matrix acting on flat vectors; for tests and small examples."""
    A = np.asarray(matrix, dtype=np.float64)
    m, n = A.shape
    return LinearOperator(
        Shape((n,)), Shape((m,)),
        _single(lambda v: A @ v), _single(lambda w: A.T @ w),
        float(np.linalg.norm(A, 2)), name="matrix",
    )


def d1_rows(m, n):
    """Forward difference along the first image axis, zero in the last row."""
    shape = Shape((m, n))
    return LinearOperator(
        shape, shape,
        _single(kernels.diff_rows), _single(kernels.diff_rows_adj),
        2.0, name="D1",
    )


def d2_cols(m, n):
    """Forward difference along the second image axis, zero in the last column."""
    shape = Shape((m, n))
    return LinearOperator(
        shape, shape,
        _single(kernels.diff_cols), _single(kernels.diff_cols_adj),
        2.0, name="D2",
    )


class StackedOperator(LinearOperator):
    """``x -> (K_1 x, ..., K_m x)`` for operators sharing one domain."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ParameterError("stack needs at least one operator")
        dom = parts[0].domain
        for p in parts[1:]:
            if p.domain != dom:
                raise ShapeError(f"domain mismatch in stack: {p.domain} vs {dom}")
        self.parts = parts
        self._offsets = np.cumsum([0] + [len(p.codomain) for p in parts])
        bounds = [p.norm_bound for p in parts]
        bound = None if any(b is None for b in bounds) else sqrt(sum(b * b for b in bounds))
        codomain = tuple(s for p in parts for s in p.codomain)
        super().__init__(dom, codomain, self._stack_apply, self._stack_adjoint, bound, name="stack")

    def split(self, y):
        """Cut a codomain vector into the per-part block vectors."""
        o = self._offsets
        return [BlockVector(y.blocks[o[i]:o[i + 1]]) for i in range(len(self.parts))]

    def _stack_apply(self, x):
        blocks = []
        for p in self.parts:
            blocks.extend(p.apply(x).blocks)
        return BlockVector(blocks)

    def _stack_adjoint(self, y):
        pieces = self.split(y)
        acc = self.parts[0].adjoint_apply(pieces[0])
        for p, piece in zip(self.parts[1:], pieces[1:]):
            acc = acc + p.adjoint_apply(piece)
        return acc


def stack(parts):
    return StackedOperator(parts)


def gaussian_kernel(size=9, sigma=1.5):
    """Normalized isotropic Gaussian kernel of odd ``size``."""
    if size % 2 == 0 or size < 1:
        raise ParameterError(f"kernel size must be odd and positive, got {size}")
    if sigma <= 0:
        raise ParameterError("kernel sigma must be positive")
    r = size // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(ax ** 2) / (2.0 * sigma ** 2))
    k = np.outer(g, g)
    return k / k.sum()


def _kernel_norm_bound(kernel, boundary):
    l1 = float(np.abs(kernel).sum())
    if boundary == "zero":
        return l1
    # With half-sample symmetric extension a centrosymmetric kernel gives a
    # symmetric matrix whose absolute row sums are at most sum|k|; otherwise
    # a source pixel can be hit twice per tap.
    if np.array_equal(kernel, kernel[::-1, ::-1]):
        return l1
    return sqrt(2.0) * l1


def conv2d(kernel, m, n, boundary="symmetric"):
    """2-D correlation with ``kernel`` on an ``m`` x ``n`` image.

    ``boundary`` is ``'zero'`` (zero padding) or ``'symmetric'`` (half-sample
    mirror padding). The adjoint correlates with the rotated kernel and folds
    the padded border back for the symmetric rule.
    """
    k = np.ascontiguousarray(kernel, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
        raise ParameterError(f"kernel dimensions must be odd, got {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ParameterError("kernel entries must be finite")
    if boundary not in ("zero", "symmetric"):
        raise ParameterError(f"unknown boundary rule {boundary!r}")
    sym = boundary == "symmetric"
    shape = Shape((m, n))
    return LinearOperator(
        shape, shape,
        _single(lambda u: kernels.correlate2d(u, k, sym)),
        _single(lambda v: kernels.correlate2d_adj(v, k, sym)),
        _kernel_norm_bound(k, boundary), name=f"conv{k.shape}",
    )


def random_like_space(space, rng):
    return BlockVector([rng.normal(s.dims) for s in space])


def estimate_norm(op, iters=100, tol=1e-8, rng=None):
    """Power iteration on ``op* op`` from a random start.

    Returns ``||op x||`` for the final unit iterate, a Rayleigh-quotient
    estimate that never exceeds the true norm. Stops early once the relative
    change drops below ``tol``.
    """
    if iters < 1:
        raise ParameterError("iters must be >= 1")
    if tol <= 0:
        raise ParameterError("tol must be positive")
    rng = rng if rng is not None else RngStream(0)
    x = random_like_space(op.domain, rng)
    nx = norm2(x)
    if nx == 0.0:
        return 0.0
    x = x / nx
    est = 0.0
    for _ in range(iters):
        kx = op.apply(x)
        new = norm2(kx)
        if new == 0.0:
            return 0.0
        z = op.adjoint_apply(kx)
        nz = norm2(z)
        if nz == 0.0:
            return new
        x = z / nz
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return norm2(op.apply(x)) if est > 0 else est
