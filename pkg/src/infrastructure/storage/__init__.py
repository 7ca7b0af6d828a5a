"""
Field dumps, previews and checkpoints.
"""
from .field_io import (
    FIELD_MAGIC,
    Checkpoint,
    load_checkpoint,
    read_field,
    save_checkpoint,
    write_field,
    write_pgm,
)

__all__ = [
    "FIELD_MAGIC",
    "Checkpoint",
    "load_checkpoint",
    "read_field",
    "save_checkpoint",
    "write_field",
    "write_pgm",
]
