"""Counter-based splittable random streams.

One master seed feeds every experiment.  Each consumer derives an
independent substream from the master seed plus a *path* of tokens
(strings or non-negative integers), e.g. ``("mse-sweep", "channel", 17)``
for the channel draws of trial 17.  Substreams are independent of the
order in which they are created and of which worker creates them, so
trials can run in any schedule, on any number of workers, and still
replay bit-identically.

The generator is Philox (counter-based); the path is folded into the
SeedSequence entropy, string tokens via a stable blake2b hash.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "stream_key"]


def _encode_token(token) -> int:
    if isinstance(token, (int, np.integer)):
        if token < 0:
            raise ValueError(f"stream path tokens must be non-negative, got {token}")
        return int(token)
    if isinstance(token, str):
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"stream path tokens must be int or str, got {type(token).__name__}")


def stream_key(master_seed: int, *path) -> str:
    """Human-readable identity of a substream, recorded in trial outputs."""
    return "/".join([str(int(master_seed))] + [str(t) for t in path])


def substream(master_seed: int, *path) -> np.random.Generator:
    """Derive the independent generator for (master_seed, *path).

    Identical arguments always return a generator producing a
    bit-identical stream; distinct paths give statistically independent
    streams.  Generators must not be shared between concurrent
    consumers; derive one per worker/trial/role instead.
    """
    entropy = [int(master_seed)] + [_encode_token(t) for t in path]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
