"""Core value types and file I/O for images and blur kernels.

Images and kernels are plain 2-D float64 numpy arrays throughout the
package: an image holds intensities nominally in [0, 1] (intermediate
solver iterates may leave the range; only loaded and saved images are
clamped), a kernel is a small square grid of nonnegative weights on the
probability simplex.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

SIMPLEX_TOL = 1e-9


class FormatError(ValueError):
    """Raised for malformed image or kernel files."""


def _require_odd(s_side):
    if s_side < 1 or s_side % 2 == 0:
        raise ValueError(f"kernel side must be a positive odd integer, got {s_side}")


def uniform_kernel(s_side: int) -> np.ndarray:
    """Kernel with every entry 1/s, s = s_side**2."""
    _require_odd(s_side)
    s = s_side * s_side
    return np.full((s_side, s_side), 1.0 / s)


def check_kernel(k: np.ndarray, tol: float = SIMPLEX_TOL) -> None:
    """Validate simplex membership: nonnegative entries summing to 1."""
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError("kernel must be a square 2-D array")
    if np.any(k < 0):
        raise ValueError("kernel has negative entries")
    if abs(k.sum() - 1.0) > tol:
        raise ValueError(f"kernel weights sum to {k.sum()!r}, not 1")


@dataclass(frozen=True)
class Objective:
    """Deblurring objective: ||f * k - b||_2^2 + lam * TV(f)."""

    blurred: np.ndarray
    lam: float = 6e-4
    tv_variant: str = "isotropic_p2"  # or "anisotropic_p1"
    boundary: str = "circular"        # or "replicate"
    tv_epsilon: float = 1e-3

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.tv_epsilon <= 0:
            raise ValueError("tv_epsilon must be positive")
        if self.tv_variant not in ("anisotropic_p1", "isotropic_p2"):
            raise ValueError(f"unknown tv_variant {self.tv_variant!r}")
        if self.boundary not in ("circular", "replicate"):
            raise ValueError(f"unknown boundary {self.boundary!r}")


@dataclass
class SolverConfig:
    algorithm: str = "prida"          # or "pgd"
    max_iters: int = 300
    alpha: float = 0.5                # per-coordinate step parameter in (0, 1)
    big_m: float = 1000.0             # cap on the multiplicative update factor
    lipschitz_estimate: object = "auto"  # "auto" or a positive float
    tol_move: float | None = None     # None -> 1e-7 * sqrt(n + s)
    relip_every: int = 0              # 0 -> estimate once per solve
    descent_fallback: bool = True     # retry with safe steps if objective rises
    freeze_f: bool = False            # optimize the kernel only
    freeze_k: bool = False            # optimize the image only (non-blind)
    seed: int = 0                     # power-iteration start vector

    def __post_init__(self):
        if self.algorithm not in ("prida", "pgd"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.big_m < 1.0:
            raise ValueError("big_m must be >= 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")


@dataclass
class Trace:
    """Per-iteration solver record."""

    objective: list = field(default_factory=list)
    eta_f: list = field(default_factory=list)
    eta_k_max: list = field(default_factory=list)
    move_l2: list = field(default_factory=list)
    kl_step: list = field(default_factory=list)

    def append(self, objective, eta_f, eta_k_max, move_l2, kl_step):
        self.objective.append(float(objective))
        self.eta_f.append(float(eta_f))
        self.eta_k_max.append(float(eta_k_max))
        self.move_l2.append(float(move_l2))
        self.kl_step.append(float(kl_step))

    def __len__(self):
        return len(self.objective)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write("t,objective,eta_f,eta_k_max,move_l2,kl_step\r\n")
            for t in range(len(self.objective)):
                fh.write(
                    f"{t},{self.objective[t]!r},{self.eta_f[t]!r},"
                    f"{self.eta_k_max[t]!r},{self.move_l2[t]!r},{self.kl_step[t]!r}\r\n"
                )


# ---------------------------------------------------------------------------
# Image I/O: binary PGM (P5, maxval 255 / 65535) and grayscale PNG.
# Color PNG input is converted by per-channel average.
# ---------------------------------------------------------------------------

def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    # header = magic, width, height, maxval; '#' starts a comment
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FormatError(f"{path}: bad PGM header") from exc
    if width <= 0 or height <= 0:
        raise FormatError(f"{path}: zero image dimensions")
    if maxval <= 0 or maxval >= 65536:
        raise FormatError(f"{path}: unsupported maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    count = width * height
    if len(data) - pos < count * dtype.itemsize:
        raise FormatError(f"{path}: truncated PGM pixel data")
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    img = raw.astype(np.float64).reshape(height, width) / maxval
    return img


def _write_pgm(img: np.ndarray, path: Path) -> None:
    q = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    h, w = q.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(q.tobytes())


def load_image(path) -> np.ndarray:
    """Load a grayscale image with intensities scaled to [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise IOError(f"no such file: {path}")
    if path.suffix.lower() in (".pgm", ".ppm"):
        img = _read_pgm(path)
    else:
        try:
            with PILImage.open(path) as im:
                if im.mode in ("RGB", "RGBA"):
                    arr = np.asarray(im.convert("RGB"), dtype=np.float64)
                    img = arr.mean(axis=2) / 255.0
                elif im.mode == "I;16":
                    img = np.asarray(im, dtype=np.float64) / 65535.0
                elif im.mode == "I":
                    img = np.asarray(im, dtype=np.float64) / 65535.0
                else:
                    img = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
        except (OSError, SyntaxError) as exc:
            raise IOError(f"cannot read image {path}: {exc}") from exc
    if img.size == 0 or img.shape[0] == 0 or img.shape[1] == 0:
        raise FormatError(f"{path}: zero image dimensions")
    return np.clip(img, 0.0, 1.0)


def save_image(img: np.ndarray, path) -> None:
    """Write an image, clamping intensities to [0, 1] first."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        _write_pgm(img, path)
        return
    q = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    try:
        PILImage.fromarray(q, mode="L").save(path)
    except OSError as exc:
        raise IOError(f"cannot write image {path}: {exc}") from exc


def save_kernel_txt(k: np.ndarray, path) -> None:
    """Plain-text kernel: header "s s", then rows of weights written with
    repr(), i.e. the shortest decimal that round-trips the float exactly."""
    s = k.shape[0]
    lines = [f"{s} {s}"]
    for row in k:
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_kernel_txt(path) -> np.ndarray:
    tokens = Path(path).read_text(encoding="utf-8").split()
    if len(tokens) < 2:
        raise FormatError(f"{path}: truncated kernel file")
    rows, cols = int(tokens[0]), int(tokens[1])
    if rows != cols:
        raise FormatError(f"{path}: kernel must be square, got {rows}x{cols}")
    vals = np.array([float(t) for t in tokens[2:]], dtype=np.float64)
    if vals.size != rows * cols:
        raise FormatError(f"{path}: expected {rows * cols} weights, got {vals.size}")
    return vals.reshape(rows, cols)
