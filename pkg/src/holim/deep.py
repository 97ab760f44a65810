"""Run deeply recursive checking on a thread with a large stack."""

from __future__ import annotations

import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 200_000


def run_deep(fn, *args, **kwargs):
    """Call ``fn`` on a big-stack thread and return its result (or re-raise)."""
    if getattr(_state, "inside", False):
        return fn(*args, **kwargs)
    out = {}

    def target():
        _state.inside = True
        try:
            out["value"] = fn(*args, **kwargs)
        except BaseException as e:  # noqa: BLE001 - re-raised in the caller
            out["error"] = e

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, RECURSION_LIMIT))
    old_size = threading.stack_size()
    threading.stack_size(STACK_BYTES)
    try:
        t = threading.Thread(target=target, name="holim-deep")
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    if "error" in out:
        raise out["error"]
    return out.get("value")


_state = threading.local()
