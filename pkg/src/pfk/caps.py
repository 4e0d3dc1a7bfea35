"""Enumeration caps.

Every exhaustive scan in the package is guarded by a single budget: the
number of subset/candidate evaluations it may perform.  Exceeding the
budget never silently passes; callers either get a CapExceeded error or
an explicit "unverified" verdict.
"""

from __future__ import annotations

import os

DEFAULT_CAP = 1 << 20


class CapExceeded(RuntimeError):
    """An exhaustive scan would exceed the configured evaluation budget."""

    def __init__(self, what: str, needed: int, cap: int):
        super().__init__(f"{what}: needs {needed} evaluations, cap is {cap}")
        self.what = what
        self.needed = needed
        self.cap = cap


def resolve_cap(cap: int | None = None) -> int:
    """Explicit argument wins, then the PFK_CAP env var, then the default."""
    if cap is not None:
        return cap
    env = os.environ.get("PFK_CAP")
    if env:
        return int(env)
    return DEFAULT_CAP


def check_cap(what: str, needed: int, cap: int | None = None) -> int:
    limit = resolve_cap(cap)
    if needed > limit:
        raise CapExceeded(what, needed, limit)
    return limit
