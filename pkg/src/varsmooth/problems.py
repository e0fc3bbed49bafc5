"""TV denoising / deblurring benchmark problems and synthetic data."""

from dataclasses import dataclass

import numpy as np

from .linops import conv2d, d1_rows, d2_cols, gaussian_kernel
from .moreau import SmoothedTerm
from .proxlib import l1_norm, l2_dist, zero_function
from .solvers import CompositeProblem
from .spaces import BlockVector, ParameterError, RngStream, gaussian

# The data term is an unsquared norm, so alpha has to grow with sqrt(m n) to
# keep the solution away from a constant image; these suit 32x32 .. 64x64.
DEFAULT_ALPHA = {"denoise": 40.0, "deblur": 80.0}


@dataclass(frozen=True)
class KernelSpec:
    size: int = 9
    sigma: float = 1.5
    boundary: str = "symmetric"

    def array(self):
        return gaussian_kernel(self.size, self.sigma)


@dataclass(frozen=True)
class ImageProblemSpec:
    m: int = 64
    n: int = 64
    alpha: float = DEFAULT_ALPHA["denoise"]
    noise_sigma: float = 0.1
    blur: KernelSpec = None
    seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("alpha must be positive")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be nonnegative")


def _image(b_img):
    b = b_img if isinstance(b_img, BlockVector) else BlockVector(np.asarray(b_img, dtype=np.float64))
    if len(b.blocks) != 1 or b.blocks[0].ndim != 2:
        raise ParameterError("expected a single 2-D image block")
    return b


def build_denoising(b_img, alpha):
    """alpha ||x - b||_2 + ||D1 x||_1 + ||D2 x||_1, started at b."""
    b = _image(b_img)
    m, n = b.blocks[0].shape
    terms = [SmoothedTerm(l1_norm(1.0), d1_rows(m, n)), SmoothedTerm(l1_norm(1.0), d2_cols(m, n))]
    return CompositeProblem(l2_dist(alpha, b), terms, x0=b, name="denoise")


def build_denoising_1d(signal, alpha):
    """1-D analogue: alpha ||x - b||_2 + ||D x||_1 on a 1 x n image."""
    s = np.asarray(signal, dtype=np.float64).reshape(1, -1)
    b = BlockVector(s)
    terms = [SmoothedTerm(l1_norm(1.0), d2_cols(1, s.shape[1]))]
    return CompositeProblem(l2_dist(alpha, b), terms, x0=b, name="denoise-1d")


def build_deblurring(b_img, alpha, kernel=None):
    """alpha ||C x - b||_2 + ||D1 x||_1 + ||D2 x||_1 with f = 0, started at b.

    ``kernel`` is a :class:`KernelSpec`, a 2-D array (symmetric boundary) or
    ``None`` for the default 9x9 Gaussian with standard deviation 1.5.
    """
    b = _image(b_img)
    m, n = b.blocks[0].shape
    if kernel is None:
        kernel = KernelSpec()
    if isinstance(kernel, KernelSpec):
        C = conv2d(kernel.array(), m, n, kernel.boundary)
    else:
        C = conv2d(kernel, m, n, "symmetric")
    terms = [
        SmoothedTerm(l2_dist(alpha, b), C),
        SmoothedTerm(l1_norm(1.0), d1_rows(m, n)),
        SmoothedTerm(l1_norm(1.0), d2_cols(m, n)),
    ]
    return CompositeProblem(zero_function(), terms, x0=b, name="deblur")


def make_phantom(m, n, rng):
    """Piecewise-constant test image in [0, 1]: background, two rectangles, a disc."""
    if m < 8 or n < 8:
        raise ParameterError(f"phantom needs m, n >= 8, got {m}x{n}")
    u = rng.uniform(12)
    levels = 0.1 + 0.8 * u[:4]
    img = np.full((m, n), levels[0])

    def span(frac_lo, frac_hi, size, a, b):
        lo = int(size * (frac_lo + 0.1 * a))
        hi = int(size * (frac_hi + 0.1 * b))
        return max(lo, 1), min(max(hi, lo + 2), size - 1)

    r0, r1 = span(0.1, 0.5, m, u[4], u[5])
    c0, c1 = span(0.1, 0.6, n, u[6], u[7])
    img[r0:r1, c0:c1] = levels[1]
    r0, r1 = span(0.55, 0.8, m, u[8], u[9])
    c0, c1 = span(0.15, 0.45, n, u[9], u[10])
    img[r0:r1, c0:c1] = levels[2]
    ii, jj = np.mgrid[0:m, 0:n]
    ci, cj = m * (0.55 + 0.1 * u[10]), n * (0.65 + 0.1 * u[11])
    rad = 0.18 * min(m, n)
    img[(ii - ci) ** 2 + (jj - cj) ** 2 <= rad * rad] = levels[3]
    return BlockVector(img)


def degrade(x, spec, rng=None):
    """Blur (if ``spec.blur``) and then add N(0, noise_sigma^2) noise.

    Noise comes from ``rng`` or, by default, from a stream derived from
    ``spec.seed`` that is independent of the phantom stream.
    """
    img = _image(x)
    m, n = img.blocks[0].shape
    if spec.blur is not None:
        img = conv2d(spec.blur.array(), m, n, spec.blur.boundary).apply(img)
    if spec.noise_sigma == 0:
        return img.copy()
    rng = rng if rng is not None else RngStream(spec.seed).spawn(1)
    return img + gaussian(img.space, spec.noise_sigma, rng)


def make_instance(spec):
    """Ground truth phantom and degraded data for ``spec``."""
    truth = make_phantom(spec.m, spec.n, RngStream(spec.seed).spawn(0))
    return truth, degrade(truth, spec)
