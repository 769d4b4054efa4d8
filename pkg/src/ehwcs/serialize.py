"""JSON container for ensembles and instances.

One self-contained JSON document per object:

    {
      "format": "ehwcs-container",
      "version": 1,
      "kind": "ensemble" | "instance",
      "meta": { ... dimensions and scalars ... },
      "arrays": {
        "<name>": {
          "shape": [..],
          "dtype": "complex128" | "float64" | "int64",
          "data": "<base64>"
        }, ...
      }
    }

Array payloads are little-endian 64-bit values, base64 encoded; complex
arrays are stored interleaved (re0, im0, re1, im1, ...).  Round-trips
are bit-exact, so a saved ensemble replays experiments identically.
"""

from __future__ import annotations

import base64
import json
import math

import numpy as np

from .ensemble import PowerPattern, SensingEnsemble, SparseInstance

__all__ = ["save_ensemble", "load_ensemble", "save_instance", "load_instance"]

FORMAT = "ehwcs-container"
VERSION = 1


def _encode_array(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr)
    if np.iscomplexobj(arr):
        flat = np.empty(2 * arr.size)
        flat[0::2] = arr.real.ravel()
        flat[1::2] = arr.imag.ravel()
        dtype = "complex128"
    elif np.issubdtype(arr.dtype, np.integer):
        flat = arr.astype("<i8").ravel()
        dtype = "int64"
    else:
        flat = arr.astype(float).ravel()
        dtype = "float64"
    payload = flat.astype("<f8").tobytes() if dtype != "int64" else flat.tobytes()
    return {
        "shape": list(arr.shape),
        "dtype": dtype,
        "data": base64.b64encode(payload).decode("ascii"),
    }


def _decode_array(spec: dict) -> np.ndarray:
    raw = base64.b64decode(spec["data"])
    shape = tuple(spec["shape"])
    if spec["dtype"] == "complex128":
        flat = np.frombuffer(raw, dtype="<f8")
        return (flat[0::2] + 1j * flat[1::2]).reshape(shape)
    if spec["dtype"] == "int64":
        return np.frombuffer(raw, dtype="<i8").reshape(shape).copy()
    return np.frombuffer(raw, dtype="<f8").reshape(shape).copy()


def _dump(path, kind, meta, arrays):
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "meta": meta,
        "arrays": {name: _encode_array(arr) for name, arr in arrays.items()},
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def _load(path, kind):
    with open(path, encoding="ascii") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise ValueError(f"{path}: not a {FORMAT} v{VERSION} file")
    if doc.get("kind") != kind:
        raise ValueError(f"{path}: expected kind {kind!r}, found {doc.get('kind')!r}")
    return doc


def save_ensemble(path, ensemble: SensingEnsemble, seed_key: str | None = None):
    """Write an ensemble; ``seed_key`` records the substream it came from."""
    snr = ensemble.pattern.snr_ave
    meta = {
        "m": ensemble.m,
        "n": ensemble.n,
        "p_ave": ensemble.pattern.p_ave,
        "snr_ave": None if snr is None else ("inf" if math.isinf(snr) else snr),
        "seed_key": seed_key,
    }
    arrays = {
        "gamma": ensemble.pattern.gamma,
        "sigma_mat": ensemble.sigma_mat,
        "z_tilde": ensemble.z_tilde,
        "a_mat": ensemble.a_mat,
    }
    _dump(path, "ensemble", meta, arrays)


def load_ensemble(path) -> SensingEnsemble:
    doc = _load(path, "ensemble")
    meta, arrays = doc["meta"], doc["arrays"]
    snr = meta["snr_ave"]
    if snr == "inf":
        snr = math.inf
    pattern = PowerPattern(gamma=_decode_array(arrays["gamma"]), p_ave=meta["p_ave"], snr_ave=snr)
    return SensingEnsemble(
        sigma_mat=_decode_array(arrays["sigma_mat"]),
        z_tilde=_decode_array(arrays["z_tilde"]),
        a_mat=_decode_array(arrays["a_mat"]),
        m=int(meta["m"]),
        pattern=pattern,
    )


def save_instance(path, instance: SparseInstance, seed_key: str | None = None):
    meta = {"n": int(instance.x.shape[0]), "m": int(instance.y.shape[0]), "seed_key": seed_key}
    arrays = {
        "x": instance.x,
        "support": instance.support.astype(np.int64),
        "y": instance.y,
        "noise": instance.noise,
    }
    _dump(path, "instance", meta, arrays)


def load_instance(path) -> SparseInstance:
    doc = _load(path, "instance")
    arrays = doc["arrays"]
    return SparseInstance(
        x=_decode_array(arrays["x"]),
        support=_decode_array(arrays["support"]),
        y=_decode_array(arrays["y"]),
        noise=_decode_array(arrays["noise"]),
    )
