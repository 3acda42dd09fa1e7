"""Resource caps for the exact-algebra stages.

Defaults can be overridden through the ``LOOPM_RESOURCE_LIMITS``
environment variable, e.g. ``LOOPM_RESOURCE_LIMITS="max_pairs=5000,closure_cap=300"``.
"""

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "LOOPM_RESOURCE_LIMITS"


@dataclass(frozen=True)
class Limits:
    max_pairs: int = 100_000
    max_terms: int = 1_000_000
    hilbert_entry_bound: int = 64
    closure_cap: int = 2000
    support_iterations: int = 64
    support_values: int = 256
    support_bits: int = 256
    surd_exponent_bound: int = 4
    surd_search_size: int = 2_000_000


def parse_limits(text, base=None):
    base = base or Limits()
    known = {f.name for f in fields(Limits)}
    updates = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"unknown resource limit {key!r}")
        updates[key] = int(value)
    return replace(base, **updates)


def limits_from_env(environ=None):
    environ = os.environ if environ is None else environ
    text = environ.get(ENV_VAR, "")
    return parse_limits(text) if text else Limits()


DEFAULT_LIMITS = Limits()
