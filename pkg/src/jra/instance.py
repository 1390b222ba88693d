"""Problem instances: node identities, coordinates, costs, generation and JSON I/O.

Node ids follow the usual JRA numbering: items are ``1..n`` and placeholders
``n+1..2n``. Item ``n`` is the goal and placeholder ``2n`` the start when the
fixed pair is enabled.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InstanceError(ValueError):
    """Invalid instance data (bad counts, non-finite coordinates, bad schema)."""


class NonConnectableError(ValueError):
    """Raised for a cost query between two nodes of the same side."""


@dataclass(frozen=True, eq=False)
class Instance:
    items: np.ndarray
    placeholders: np.ndarray
    fixed_pair: bool = True
    area: float = 1.0

    def __post_init__(self):
        items = np.array(self.items, dtype=np.float64)
        places = np.array(self.placeholders, dtype=np.float64)
        if items.ndim != 2 or items.shape[1] != 2:
            raise InstanceError("items must be a list of [x, y] points")
        if places.ndim != 2 or places.shape[1] != 2:
            raise InstanceError("placeholders must be a list of [x, y] points")
        if len(places) != len(items):
            raise InstanceError(
                f"placeholder count {len(places)} != n ({len(items)})"
            )
        if len(items) < 2:
            raise InstanceError(f"n must be >= 2, got {len(items)}")
        if not np.isfinite(items).all():
            raise InstanceError("items contain a non-finite coordinate")
        if not np.isfinite(places).all():
            raise InstanceError("placeholders contain a non-finite coordinate")
        if not (math.isfinite(self.area) and self.area > 0):
            raise InstanceError(f"area must be positive, got {self.area}")
        items.setflags(write=False)
        places.setflags(write=False)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "placeholders", places)
        object.__setattr__(self, "area", float(self.area))
        object.__setattr__(self, "fixed_pair", bool(self.fixed_pair))

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def goal_item(self) -> int:
        return self.n

    @property
    def start_placeholder(self) -> int:
        return 2 * self.n

    def is_item(self, v: int) -> bool:
        return 1 <= v <= self.n

    def is_placeholder(self, v: int) -> bool:
        return self.n < v <= 2 * self.n

    def coord(self, v: int) -> np.ndarray:
        if self.is_item(v):
            return self.items[v - 1]
        if self.is_placeholder(v):
            return self.placeholders[v - self.n - 1]
        raise InstanceError(f"node id {v} outside 1..{2 * self.n}")

    def coords(self) -> np.ndarray:
        """All node coordinates as a (2n, 2) array, row ``v - 1`` for node ``v``."""
        return np.vstack([self.items, self.placeholders])

    def cost(self, i: int, p: int) -> float:
        """Euclidean length of the item-placeholder edge ``(i, p)``."""
        if self.is_item(i) and self.is_placeholder(p):
            a, b = self.items[i - 1], self.placeholders[p - self.n - 1]
        elif self.is_item(p) and self.is_placeholder(i):
            a, b = self.items[p - 1], self.placeholders[i - self.n - 1]
        else:
            self.coord(i), self.coord(p)  # range check
            raise NonConnectableError(
                f"nodes {i} and {p} are on the same side and cannot be connected"
            )
        return math.hypot(a[0] - b[0], a[1] - b[1])

    def cost_matrix(self) -> np.ndarray:
        """Dense ``n x n`` cost matrix, row = item index, column = placeholder index."""
        d = self.items[:, None, :] - self.placeholders[None, :, :]
        return np.hypot(d[..., 0], d[..., 1])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "items": self.items.tolist(),
            "placeholders": self.placeholders.tolist(),
            "fixed_pair": self.fixed_pair,
            "area": self.area,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        if not isinstance(data, dict):
            raise InstanceError("instance JSON must be an object")
        for key in ("n", "items", "placeholders"):
            if key not in data:
                raise InstanceError(f"missing field {key!r}")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise InstanceError("field 'n' must be an integer")
        if len(data["items"]) != n:
            raise InstanceError(f"item count {len(data['items'])} != n ({n})")
        if len(data["placeholders"]) != n:
            raise InstanceError(
                f"placeholder count {len(data['placeholders'])} != n ({n})"
            )
        try:
            return cls(
                items=np.array(data["items"], dtype=np.float64),
                placeholders=np.array(data["placeholders"], dtype=np.float64),
                fixed_pair=bool(data.get("fixed_pair", True)),
                area=float(data.get("area", 1.0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InstanceError):
                raise
            raise InstanceError(f"malformed coordinates: {exc}") from exc

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.fixed_pair == other.fixed_pair
            and self.area == other.area
            and np.array_equal(self.items, other.items)
            and np.array_equal(self.placeholders, other.placeholders)
        )

    __hash__ = None


def generate(n: int, seed: int = 0, area: float = 1.0, fixed_pair: bool = True) -> Instance:
    """Uniform i.i.d. points on a square of the given area; pure in (n, seed, area)."""
    if n < 2:
        raise InstanceError(f"n must be >= 2, got {n}")
    side = math.sqrt(area)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, side, size=(2 * n, 2))
    return Instance(pts[:n], pts[n:], fixed_pair=fixed_pair, area=area)


def dumps(inst: Instance) -> str:
    return json.dumps(inst.to_dict(), indent=2) + "\n"


def loads(text: str) -> Instance:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    return Instance.from_dict(data)


def _reject_constant(name):
    raise InstanceError(f"non-finite coordinate {name}")


def save(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst))


def load(path) -> Instance:
    return loads(Path(path).read_text())
