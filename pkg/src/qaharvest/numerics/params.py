"""Named trainable parameters, SGD with gradient clipping, and checkpoints.

Checkpoint layout: an 8-byte little-endian unsigned length, a UTF-8 JSON
manifest of that length, then all parameter values as one flat
little-endian float64 blob. The manifest lists entries sorted by name,
each with its shape and byte offset into the blob, so a file can be
inspected without loading the arrays.
"""

from __future__ import annotations

import json
import struct
from typing import Iterable

import numpy as np

from .rng import RngState
from .tensor import Tensor

__all__ = ["Parameter", "ParameterStore", "sgd_step"]

_MAGIC = struct.Struct("<Q")


class Parameter(Tensor):
    """A leaf tensor with a stable name, always tracked for gradients."""

    __slots__ = ("name",)

    def __init__(self, name: str, data):
        super().__init__(data, requires_grad=True)
        self.name = name

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.data.shape})"


class ParameterStore:
    """Ordered collection of uniquely named parameters."""

    def __init__(self):
        self._params: dict[str, Parameter] = {}

    def create(self, name: str, shape: tuple[int, ...], rng: RngState | None = None, scale: float = 0.1) -> Parameter:
        """New parameter, U(-scale, scale) if an rng is given, else zeros."""
        if name in self._params:
            raise ValueError(f"duplicate parameter name: {name}")
        if rng is None:
            data = np.zeros(shape, dtype=np.float64)
        else:
            data = rng.uniform(-scale, scale, shape)
        p = Parameter(name, data)
        self._params[name] = p
        return p

    def add(self, param: Parameter) -> Parameter:
        if param.name in self._params:
            raise ValueError(f"duplicate parameter name: {param.name}")
        self._params[param.name] = param
        return param

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self):
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def zero_grad(self) -> None:
        for p in self._params.values():
            p.grad = None

    def total_size(self) -> int:
        return sum(p.data.size for p in self._params.values())

    def state(self) -> dict[str, np.ndarray]:
        """Detached copies of all values, for best-model snapshots."""
        return {name: p.data.copy() for name, p in self._params.items()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for name, p in self._params.items():
            if name not in state:
                raise KeyError(f"missing parameter in state: {name}")
            if state[name].shape != p.data.shape:
                raise ValueError(f"shape mismatch for {name}")
            p.data = state[name].astype(np.float64).copy()

    def save(self, path, meta: dict | None = None) -> None:
        entries = []
        blobs = []
        offset = 0
        for name in sorted(self._params):
            p = self._params[name]
            raw = np.ascontiguousarray(p.data, dtype="<f8").tobytes()
            entries.append({"name": name, "shape": list(p.data.shape), "offset": offset})
            blobs.append(raw)
            offset += len(raw)
        manifest = {"format": "qaharvest-checkpoint-v1", "params": entries}
        if meta is not None:
            manifest["meta"] = meta
        header = json.dumps(manifest, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(_MAGIC.pack(len(header)))
            fh.write(header)
            for raw in blobs:
                fh.write(raw)

    @staticmethod
    def read_manifest(path) -> dict:
        """Checkpoint manifest alone (shapes, offsets, meta), no arrays."""
        with open(path, "rb") as fh:
            (hlen,) = _MAGIC.unpack(fh.read(_MAGIC.size))
            return json.loads(fh.read(hlen).decode("utf-8"))

    def load(self, path) -> dict:
        """Load values in place; names and shapes must match exactly."""
        with open(path, "rb") as fh:
            (hlen,) = _MAGIC.unpack(fh.read(_MAGIC.size))
            manifest = json.loads(fh.read(hlen).decode("utf-8"))
            blob = fh.read()
        seen = set()
        for entry in manifest["params"]:
            name = entry["name"]
            shape = tuple(entry["shape"])
            if name not in self._params:
                raise KeyError(f"checkpoint has unknown parameter: {name}")
            p = self._params[name]
            if shape != p.data.shape:
                raise ValueError(f"shape mismatch for {name}: file {shape}, model {p.data.shape}")
            count = int(np.prod(shape, dtype=np.int64)) if shape else 1
            start = entry["offset"]
            arr = np.frombuffer(blob, dtype="<f8", count=count, offset=start)
            p.data = arr.reshape(shape).astype(np.float64).copy()
            seen.add(name)
        missing = set(self._params) - seen
        if missing:
            raise KeyError(f"checkpoint missing parameters: {sorted(missing)}")
        return manifest.get("meta", {})


def sgd_step(params: Iterable[Parameter], lr: float, clip_lo: float = -5.0, clip_hi: float = 5.0) -> None:
    """One SGD update; each gradient coordinate is clamped into
    [clip_lo, clip_hi] before the step, so no single update moves a
    value by more than lr * max(|clip_lo|, clip_hi)."""
    if lr <= 0.0:
        raise ValueError("learning rate must be positive")
    for p in params:
        if p.grad is None:
            continue
        p.data -= lr * np.clip(p.grad, clip_lo, clip_hi)
