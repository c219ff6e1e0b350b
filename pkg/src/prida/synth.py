"""Seeded synthetic test instances: piecewise-constant images and
line-motion blur kernels."""

import numpy as np

__all__ = ["make_test_image", "make_motion_kernel", "make_delta_kernel"]


def make_test_image(size: int = 64, seed: int = 0, n_shapes: int = 8) -> np.ndarray:
    """Random piecewise-constant image (rectangles and a disc) in [0, 1]."""
    rng = np.random.default_rng(seed)
    img = np.full((size, size), float(rng.uniform(0.1, 0.3)))
    for _ in range(n_shapes):
        h = int(rng.integers(size // 8, size // 2))
        w = int(rng.integers(size // 8, size // 2))
        y = int(rng.integers(0, size - h))
        x = int(rng.integers(0, size - w))
        img[y:y + h, x:x + w] = rng.uniform(0.0, 1.0)
    cy, cx = rng.uniform(size * 0.25, size * 0.75, size=2)
    rad = rng.uniform(size * 0.08, size * 0.2)
    yy, xx = np.mgrid[0:size, 0:size]
    img[(yy - cy) ** 2 + (xx - cx) ** 2 < rad ** 2] = rng.uniform(0.0, 1.0)
    return np.clip(img, 0.0, 1.0)


def make_motion_kernel(side: int = 9, angle: float = 0.4, length: float | None = None) -> np.ndarray:
    """Linear motion-blur kernel: an antialiased line through the center."""
    if side % 2 == 0:
        raise ValueError("kernel side must be odd")
    if side == 1:
        return np.ones((1, 1))
    if length is None:
        length = side - 2
    c = side // 2
    k = np.zeros((side, side))
    n_samples = 8 * side
    ts = np.linspace(-length / 2.0, length / 2.0, n_samples)
    for t in ts:
        y = c + t * np.sin(angle)
        x = c + t * np.cos(angle)
        y0, x0 = int(np.floor(y)), int(np.floor(x))
        wy, wx = y - y0, x - x0
        for dy, wgt_y in ((0, 1 - wy), (1, wy)):
            for dx, wgt_x in ((0, 1 - wx), (1, wx)):
                yy, xx = y0 + dy, x0 + dx
                if 0 <= yy < side and 0 <= xx < side:
                    k[yy, xx] += wgt_y * wgt_x
    return k / k.sum()


def make_delta_kernel(side: int) -> np.ndarray:
    k = np.zeros((side, side))
    k[side // 2, side // 2] = 1.0
    return k
