"""Worker-count plumbing for the FFT kernels.

The number of workers is a pure performance knob: every transform is
batched over independent rows, so results are bitwise identical for any
worker count.  Resolution order: explicit argument, QWALK_WORKERS
environment variable, available parallelism.
"""

from __future__ import annotations

import os


def resolve_workers(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("QWALK_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1
