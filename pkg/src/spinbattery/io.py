"""Deterministic artifact files: trajectory CSV, JSON reports, MPSK checkpoints.

CSV schema (columns a function of L only): t, z_1..z_L, q_1..q_{L-1}, max_D,
err_budget.  Numbers print with 17 significant digits so doubles round-trip
exactly and repeat runs produce byte-identical files.

Checkpoint binary "MPSK": magic, u32 version, u32 site count, per site three
u32 extents, then the tensor values row-major as little-endian IEEE-754
double pairs (real, imaginary), a fixed metadata block, and a trailing
CRC-32 (u32) over all preceding bytes.
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

from .errors import IOFormatError
from .mps import MatrixProductState
from .record import TrajectoryRecord

__all__ = [
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_json",
    "write_checkpoint",
    "read_checkpoint",
    "checkpoint_info",
]

CHECKPOINT_MAGIC = b"MPSK"
CHECKPOINT_VERSION = 1

# metadata block: time, step, cum_discarded, cum_compression, log_norm_adjust,
# ortho_center (-1 for none), total magnetization reference at t=0, and the
# run's time origin (step 0 time; resumed runs rebuild the same time grid)
_META_STRUCT = struct.Struct("<dQdddqdd")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(path, record: TrajectoryRecord) -> None:
    L = record.n_sites
    cols = (["t"] + [f"z_{i}" for i in range(1, L + 1)]
            + [f"q_{i}" for i in range(1, L)] + ["max_D", "err_budget"])
    lines = [",".join(cols)]
    for k in range(record.n_times):
        row = [_fmt(record.times[k])]
        row += [_fmt(v) for v in record.z_profile[k]]
        row += [_fmt(v) for v in record.q_profile[k]]
        row.append(str(int(record.max_bond_dim[k])))
        row.append(_fmt(record.error_budget[k]))
        lines.append(",".join(row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path, junction_bond: int = 0) -> TrajectoryRecord:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not header or header[0] != "t" or header[-1] != "err_budget":
        raise IOFormatError(f"{path}: not a trajectory CSV (header {header[:3]}...)")
    n_z = sum(1 for c in header if c.startswith("z_"))
    n_q = sum(1 for c in header if c.startswith("q_"))
    if n_q != n_z - 1 or len(header) != 1 + n_z + n_q + 2:
        raise IOFormatError(f"{path}: malformed column set ({n_z} z, {n_q} q)")
    data = np.array([[float(v) for v in r] for r in rows])
    if data.size == 0:
        raise IOFormatError(f"{path}: no data rows")
    times = data[:, 0]
    z = data[:, 1:1 + n_z]
    q = data[:, 1 + n_z:1 + n_z + n_q]
    max_d = data[:, -2].astype(int)
    budget = data[:, -1]
    return TrajectoryRecord.from_rows(
        times, z, q, q[:, junction_bond], max_d,
        discarded=budget, total_z=z.sum(axis=1), budget=budget,
        metadata={"junction_bond": junction_bond, "source": str(path)},
    )


def write_json(path, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_checkpoint(path, state: MatrixProductState, time: float, step: int,
                     cum_discarded: float, cum_compression: float,
                     total_z_reference: float, time_origin: float = 0.0) -> None:
    parts = [CHECKPOINT_MAGIC, struct.pack("<II", CHECKPOINT_VERSION, state.length)]
    for t in state.tensors:
        parts.append(struct.pack("<III", *t.shape))
    for t in state.tensors:
        flat = np.ascontiguousarray(t, dtype=np.complex128).reshape(-1)
        pairs = np.empty(2 * flat.size, dtype="<f8")
        pairs[0::2] = flat.real
        pairs[1::2] = flat.imag
        parts.append(pairs.tobytes())
    center = -1 if state.ortho_center is None else state.ortho_center
    parts.append(_META_STRUCT.pack(time, step, cum_discarded, cum_compression,
                                   state.log_norm_adjust, center, total_z_reference,
                                   time_origin))
    payload = b"".join(parts)
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(payload)
        fh.write(struct.pack("<I", crc))


def _read_checkpoint_bytes(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 + 4:
        raise IOFormatError(f"{path}: truncated checkpoint")
    payload, crc_bytes = blob[:-4], blob[-4:]
    (crc_stored,) = struct.unpack("<I", crc_bytes)
    crc_actual = zlib.crc32(payload) & 0xFFFFFFFF
    if crc_stored != crc_actual:
        raise IOFormatError(
            f"{path}: CRC mismatch (stored {crc_stored:08x}, computed {crc_actual:08x})"
        )
    if payload[:4] != CHECKPOINT_MAGIC:
        raise IOFormatError(f"{path}: bad magic {payload[:4]!r}")
    version, n_sites = struct.unpack("<II", payload[4:12])
    if version != CHECKPOINT_VERSION:
        raise IOFormatError(f"{path}: unsupported checkpoint version {version}")
    return payload, n_sites


def read_checkpoint(path):
    """Returns (state, meta dict); verifies the CRC before trusting anything."""
    payload, n_sites = _read_checkpoint_bytes(path)
    off = 12
    shapes = []
    for _ in range(n_sites):
        shapes.append(struct.unpack("<III", payload[off:off + 12]))
        off += 12
    tensors = []
    for shape in shapes:
        count = shape[0] * shape[1] * shape[2]
        raw = np.frombuffer(payload, dtype="<f8", count=2 * count, offset=off)
        off += 16 * count
        t = (raw[0::2] + 1j * raw[1::2]).reshape(shape)
        tensors.append(np.ascontiguousarray(t))
    meta_raw = payload[off:off + _META_STRUCT.size]
    if len(meta_raw) != _META_STRUCT.size:
        raise IOFormatError(f"{path}: truncated metadata block")
    (time, step, cum_disc, cum_comp, log_norm, center, total_ref,
     time_origin) = _META_STRUCT.unpack(meta_raw)
    state = MatrixProductState(
        tensors,
        ortho_center=None if center < 0 else int(center),
        log_norm_adjust=log_norm,
    )
    meta = {
        "time": time,
        "step": int(step),
        "cumulative_discarded_weight": cum_disc,
        "cumulative_compression_infidelity": cum_comp,
        "total_magnetization_t0": total_ref,
        "time_origin": time_origin,
    }
    return state, meta


def checkpoint_info(path) -> dict:
    """Header and metadata of a checkpoint without materializing the state."""
    payload, n_sites = _read_checkpoint_bytes(path)
    off = 12
    shapes = []
    for _ in range(n_sites):
        shapes.append(struct.unpack("<III", payload[off:off + 12]))
        off += 12
    values = sum(s[0] * s[1] * s[2] for s in shapes)
    meta_raw = payload[off + 16 * values: off + 16 * values + _META_STRUCT.size]
    if len(meta_raw) != _META_STRUCT.size:
        raise IOFormatError(f"{path}: truncated metadata block")
    (time, step, cum_disc, cum_comp, log_norm, center, total_ref,
     time_origin) = _META_STRUCT.unpack(meta_raw)
    return {
        "version": CHECKPOINT_VERSION,
        "sites": n_sites,
        "bond_dimensions": [int(s[2]) for s in shapes[:-1]],
        "max_bond_dimension": max([1] + [int(s[2]) for s in shapes[:-1]]),
        "stored_values": values,
        "time": time,
        "step": int(step),
        "cumulative_discarded_weight": cum_disc,
        "cumulative_compression_infidelity": cum_comp,
        "log_norm_adjust": log_norm,
        "ortho_center": None if center < 0 else int(center),
        "total_magnetization_t0": total_ref,
        "time_origin": time_origin,
        "crc_ok": True,
    }
