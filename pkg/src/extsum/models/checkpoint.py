"""Versioned checkpoint container.

Layout: magic "XSCK" | u8 version=1 | u32 LE header length | header JSON
| float32 little-endian weight blobs, one per named section, in header
order.  The header carries the model kind and dims, feature-standardization
constants, the labeling threshold, the idf table hash, and the TrainConfig
manifest, so inference needs nothing beyond this file and the prepared
corpus.
"""

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataError
from .train import ModelSpec, params_from_arrays

CKPT_MAGIC = b"XSCK"
CKPT_VERSION = 1


@dataclass
class Checkpoint:
    spec: ModelSpec
    params: object
    features: dict  # {"mode", "dim", "pos_mean", "pos_std"}
    labeling: dict  # {"theta", "label_mode"}
    idf_sha256: str
    train_config: dict


def save_checkpoint(ckpt: Checkpoint, path: str | Path) -> None:
    arrays = ckpt.params.arrays()
    sections = [{"name": name, "shape": list(arr.shape)} for name, arr in arrays.items()]
    header = {
        "features": ckpt.features,
        "idf_sha256": ckpt.idf_sha256,
        "labeling": ckpt.labeling,
        "model": ckpt.spec.as_dict(),
        "sections": sections,
        "train_config": ckpt.train_config,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with Path(path).open("wb") as fh:
        fh.write(CKPT_MAGIC)
        fh.write(struct.pack("<BI", CKPT_VERSION, len(header_bytes)))
        fh.write(header_bytes)
        for arr in arrays.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise DataError(
            f"checkpoint not found: {path} (train one with `extsum train`)"
        )
    data = path.read_bytes()
    if len(data) < 9 or data[:4] != CKPT_MAGIC:
        raise DataError(f"{path}: not a checkpoint file (magic mismatch)")
    version, header_len = struct.unpack_from("<BI", data, 4)
    if version != CKPT_VERSION:
        raise DataError(f"{path}: checkpoint version {version} unsupported")
    header_end = 9 + header_len
    if header_end > len(data):
        raise DataError(f"{path}: truncated checkpoint header")
    try:
        header = json.loads(data[9:header_end].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: bad checkpoint header: {exc}") from exc

    spec = ModelSpec.from_dict(header["model"])
    arrays = {}
    offset = header_end
    for section in header["sections"]:
        count = int(np.prod(section["shape"])) if section["shape"] else 1
        end = offset + 4 * count
        if end > len(data):
            raise DataError(f"{path}: truncated weight section {section['name']!r}")
        arrays[section["name"]] = (
            np.frombuffer(data, dtype="<f4", count=count, offset=offset)
            .reshape(section["shape"])
            .astype(np.float64)
        )
        offset = end
    if offset != len(data):
        raise DataError(f"{path}: trailing bytes after weight sections")
    return Checkpoint(
        spec=spec,
        params=params_from_arrays(spec, arrays),
        features=header["features"],
        labeling=header["labeling"],
        idf_sha256=header["idf_sha256"],
        train_config=header["train_config"],
    )
