"""
Binary field dumps, PGM previews and checkpoints.

Dump layout (little-endian): 4-byte magic ``OKF1``, uint32 N, float64 L, then
N² float64 samples of u in row-major order (axis 0 is x). A checkpoint is a
dump of u plus a ``.meta`` sidecar of ``key=value`` lines.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from dotenv import dotenv_values

from domain.fields import GridSpec, RealField
from domain.solver_state import SolverState, Stepper
from infrastructure.error_handling.exceptions import CheckpointError, FieldFormatError, OkPhaseError
from infrastructure.logging_config import get_logger

logger = get_logger(__name__)

FIELD_MAGIC = b"OKF1"
HEADER_DTYPE = np.dtype([("magic", "S4"), ("n", "<u4"), ("length", "<f8")])
SAMPLE_DTYPE = np.dtype("<f8")
META_SUFFIX = ".meta"
META_KEYS = ("gamma", "m", "t", "dt", "stepper", "seed")
MASS_TOLERANCE = 1e-8

PathLike = Union[str, Path]


def write_field(path: PathLike, u: RealField) -> Path:
    """Write u as an OKF1 dump, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array([(FIELD_MAGIC, u.grid.n, u.grid.length)], dtype=HEADER_DTYPE)
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(u.values, dtype=SAMPLE_DTYPE).tobytes())
    logger.debug(f"Wrote field dump {path}")
    return path


def read_field(path: PathLike) -> RealField:
    """
    Read an OKF1 dump.

    Raises:
        FieldFormatError: on a missing file, bad magic, or wrong payload size
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise FieldFormatError(str(path), f"cannot read file: {e.strerror or e}") from e

    if len(raw) < HEADER_DTYPE.itemsize:
        raise FieldFormatError(str(path), "file shorter than the header")
    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]) != FIELD_MAGIC:
        raise FieldFormatError(str(path), f"bad magic {bytes(header['magic'])!r}")

    n = int(header["n"])
    length = float(header["length"])
    expected = HEADER_DTYPE.itemsize + n * n * SAMPLE_DTYPE.itemsize
    if len(raw) != expected:
        raise FieldFormatError(str(path), f"expected {expected} bytes for N={n}, found {len(raw)}")

    samples = np.frombuffer(raw, dtype=SAMPLE_DTYPE, offset=HEADER_DTYPE.itemsize).reshape(n, n)
    try:
        return RealField(GridSpec(n, length), samples)
    except OkPhaseError as e:
        raise FieldFormatError(str(path), e.message) from e


def write_pgm(path: PathLike, u: RealField) -> Path:
    """8-bit binary PGM preview scaled from min(u) to max(u); constant fields are mid-grey."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lo, hi = u.min, u.max
    if hi > lo:
        pixels = np.round(255.0 * (u.values - lo) / (hi - lo))
    else:
        pixels = np.full(u.values.shape, 128.0)
    # rows of the image run along y, top row is the largest y
    image = np.flipud(pixels.T).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{u.grid.n} {u.grid.n}\n255\n".encode("ascii"))
        f.write(image.tobytes())
    return path


@dataclass(frozen=True)
class Checkpoint:
    state: SolverState
    seed: int


def _meta_path(path: Path) -> Path:
    return path.with_suffix(META_SUFFIX)


def save_checkpoint(path: PathLike, state: SolverState, seed: int) -> Path:
    """Dump u = m + ū and its metadata sidecar."""
    path = Path(path)
    write_field(path, state.field.shifted(state.m))
    meta = {
        "gamma": repr(float(state.gamma)),
        "m": repr(float(state.m)),
        "t": repr(float(state.t)),
        "dt": repr(float(state.dt)),
        "stepper": state.stepper.value,
        "seed": str(int(seed)),
    }
    _meta_path(path).write_text("".join(f"{k}={v}\n" for k, v in meta.items()), encoding="utf-8")
    logger.info(f"Checkpoint saved to {path}")
    return path


def load_checkpoint(path: PathLike) -> Checkpoint:
    """
    Read a checkpoint back into a solver state.

    Raises:
        CheckpointError: on missing or malformed metadata, or a mass mismatch
        FieldFormatError: on a malformed dump
    """
    path = Path(path)
    meta_path = _meta_path(path)
    if not meta_path.exists():
        raise CheckpointError(str(path), f"metadata file {meta_path.name} not found")

    meta = dotenv_values(meta_path)
    missing = [k for k in META_KEYS if not meta.get(k)]
    if missing:
        raise CheckpointError(str(path), f"missing metadata keys: {', '.join(missing)}")

    try:
        gamma = float(meta["gamma"])
        m = float(meta["m"])
        t = float(meta["t"])
        dt = float(meta["dt"])
        stepper = Stepper(meta["stepper"])
        seed = int(meta["seed"])
    except ValueError as e:
        raise CheckpointError(str(path), f"malformed metadata: {e}") from e

    u = read_field(path)
    if abs(u.mean - m) > MASS_TOLERANCE:
        raise CheckpointError(str(path), f"field mean {u.mean:.3e} does not match m={m}")

    state = SolverState(field=u.deviation(), t=t, dt=dt, gamma=gamma, m=m, stepper=stepper)
    return Checkpoint(state=state, seed=seed)
