"""JSON and CSV helpers for the command line."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO

from .model import Allocation, BudgetDomain, Equilibrium, GameSpec, Multiplicity, make_equilibrium, recover_duals


def read_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _clean(obj: Any) -> Any:
    # JSON has no inf/nan; encode them as strings so reports stay valid JSON
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def equilibrium_from_dict(spec: GameSpec, data: dict[str, Any]) -> Equilibrium:
    """Rebuild an equilibrium; accepts a full solve report or a bare ``{x, y}`` dict.

    Missing shadow prices are recovered from the allocation.
    """
    if "equilibrium" in data:
        data = data["equilibrium"]
    x, y = data["x"], data["y"]
    if len(x) != spec.n or len(y) != spec.n:
        raise ValueError(f"allocation has {len(x)}/{len(y)} entries, spec has {spec.n} targets")
    if "lambda" in data and "rho" in data:
        lam, rho = float(data["lambda"]), float(data["rho"])
    else:
        lam, rho = recover_duals(spec, Allocation(x, y))
    dom = BudgetDomain(data["domain"]) if data.get("domain") else None
    mult = Multiplicity(data.get("multiplicity", Multiplicity.UNIQUE.value))
    fi = data.get("free_interval")
    return make_equilibrium(spec, x, y, lam, rho, dom, mult, None if fi is None else (float(fi[0]), float(fi[1])))


def write_csv(fh: TextIO, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
