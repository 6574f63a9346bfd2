"""Canonical JSON forms: 1-based words and subsets, sorted keys."""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from .weyl import WeylElt


def word(w: WeylElt) -> list[int]:
    return [i + 1 for i in w.reduced_word]


def subset(J: Iterable[int]) -> list[int]:
    return sorted(j + 1 for j in J)


def seq(ss: Iterable[Optional[int]]) -> list[int]:
    # the neutral letter is written as 0
    return [0 if s is None else s + 1 for s in ss]


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
