"""Parameter grids, triangle meshes and OBJ output."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NumericFailure, ValidationError

DOMAIN_TYPES = ("disk", "annulus", "rect")


@dataclass(frozen=True)
class Domain:
    """A parameter region: a disk, an annulus or an axis-aligned rectangle."""

    kind: str
    center: complex = 0j
    r_min: float = 0.0
    r_max: float = 1.0
    x: tuple = (-1.0, 1.0)
    y: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.kind not in DOMAIN_TYPES:
            raise ValidationError(f"unknown domain type {self.kind!r}")
        if self.kind != "rect" and not (0 <= self.r_min < self.r_max and np.isfinite(self.r_max)):
            raise ValidationError("domain radii must satisfy 0 <= r_min < r_max < inf")
        if self.kind == "disk" and self.r_min != 0:
            raise ValidationError("a disk has r_min = 0")
        if self.kind == "rect" and not (self.x[0] < self.x[1] and self.y[0] < self.y[1]):
            raise ValidationError("rectangle bounds must be increasing")

    @property
    def diameter(self) -> float:
        if self.kind == "rect":
            return float(np.hypot(self.x[1] - self.x[0], self.y[1] - self.y[0]))
        return 2 * self.r_max

    def contains(self, z: complex) -> bool:
        if self.kind == "rect":
            return self.x[0] <= z.real <= self.x[1] and self.y[0] <= z.imag <= self.y[1]
        return self.r_min <= abs(z - self.center) <= self.r_max

    def encloses(self, z: complex) -> bool:
        """True if ``z`` lies in the hole of an annulus."""
        return self.kind == "annulus" and abs(z - self.center) < self.r_min

    def to_json(self) -> dict:
        if self.kind == "rect":
            return {"type": "rect", "x": list(self.x), "y": list(self.y)}
        out = {"type": self.kind, "center": [self.center.real, self.center.imag], "r_max": self.r_max}
        if self.kind == "annulus":
            out["r_min"] = self.r_min
        return out

    @classmethod
    def from_json(cls, obj) -> "Domain":
        if not isinstance(obj, dict) or "type" not in obj:
            raise ValidationError("domain must be an object with a 'type'")
        kind = obj["type"]
        try:
            if kind == "rect":
                return cls("rect", x=tuple(map(float, obj["x"])), y=tuple(map(float, obj["y"])))
            c = obj.get("center", [0, 0])
            center = complex(float(c[0]), float(c[1]))
            r_max = float(obj.get("r_max", obj.get("radius", 1.0)))
            r_min = float(obj.get("r_min", 0.0)) if kind == "annulus" else 0.0
            return cls(kind, center=center, r_min=r_min, r_max=r_max)
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ValidationError(f"malformed domain: {exc}") from None


@dataclass(frozen=True)
class Grid:
    """Structured ``n x n`` parameter grid; ``z[i, j]`` with ``i`` radial/y."""

    z: np.ndarray
    wrap: bool  # last column joins the first (closed angular direction)

    @property
    def shape(self) -> tuple[int, int]:
        return self.z.shape

    def edges(self):
        """Index pairs of neighbouring nodes in flattened order."""
        n0, n1 = self.shape
        idx = np.arange(n0 * n1).reshape(n0, n1)
        out = [np.stack([idx[:-1].ravel(), idx[1:].ravel()], 1), np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], 1)]
        if self.wrap:
            out.append(np.stack([idx[:, -1], idx[:, 0]], 1))
        return np.concatenate(out)

    def faces(self) -> np.ndarray:
        n0, n1 = self.shape
        idx = np.arange(n0 * n1).reshape(n0, n1)
        right = np.roll(idx, -1, axis=1) if self.wrap else idx[:, 1:]
        left = idx if self.wrap else idx[:, :-1]
        a, b = left[:-1], left[1:]
        c, d = right[1:], right[:-1]
        return np.concatenate([np.stack([a, b, c], -1).reshape(-1, 3), np.stack([a, c, d], -1).reshape(-1, 3)])


def make_grid(domain: Domain, n: int, wrap: bool | None = None) -> Grid:
    """Polar grid for disks and annuli, Cartesian grid for rectangles.

    Polar grids wrap in angle by default; with ``wrap=False`` the angle runs
    over ``[-pi, pi]`` with both ends included, which gives a fundamental
    domain when a lifted quantity has monodromy around the hole.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValidationError("resolution must be an integer >= 2")
    if domain.kind == "rect":
        xs = np.linspace(*domain.x, n)
        ys = np.linspace(*domain.y, n)
        return Grid(ys[:, None] * 1j + xs[None, :], False)
    wrap = True if wrap is None else wrap
    r = np.linspace(domain.r_min, domain.r_max, n)
    t = np.linspace(0, 2 * np.pi, n, endpoint=False) if wrap else np.linspace(-np.pi, np.pi, n)
    return Grid(domain.center + r[:, None] * np.exp(1j * t[None, :]), wrap)


@dataclass
class SurfaceMesh:
    vertices: np.ndarray  # (N, 3)
    faces: np.ndarray  # (M, 3), 0-indexed
    singular: np.ndarray  # (N,) bool
    params: np.ndarray  # (N,) complex parameter of each vertex
    extras: dict = field(default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def summary(self) -> dict:
        return {
            "vertices": int(self.n_vertices),
            "faces": int(len(self.faces)),
            "singular_vertices": int(np.count_nonzero(self.singular)),
            **{k: v for k, v in self.extras.items() if isinstance(v, (int, float, str, bool))},
        }


def build_mesh(grid: Grid, keep: np.ndarray, positions: np.ndarray, singular: np.ndarray, extras=None) -> SurfaceMesh:
    """Assemble a mesh from per-node data, dropping nodes with ``keep`` False.

    Triangles touching a dropped node, or whose vertices coincide in the
    parameter domain, are removed and the remaining vertices renumbered.
    """
    z = grid.z.ravel()
    keep = keep.ravel() & np.all(np.isfinite(positions.reshape(len(z), -1)), axis=1)
    tri = grid.faces()
    tri = tri[np.all(keep[tri], axis=1)]
    zt = z[tri]
    nondeg = (zt[:, 0] != zt[:, 1]) & (zt[:, 1] != zt[:, 2]) & (zt[:, 0] != zt[:, 2])
    tri = tri[nondeg]
    new = np.full(len(z), -1)
    new[keep] = np.arange(np.count_nonzero(keep))
    return SurfaceMesh(
        vertices=positions.reshape(len(z), 3)[keep],
        faces=new[tri],
        singular=singular.ravel()[keep],
        params=z[keep],
        extras=dict(extras or {}),
    )


def emit_obj(mesh: SurfaceMesh, path: str | Path) -> Path:
    """Write an OBJ file: ``v`` lines with 17 significant digits, 1-indexed ``f`` lines.

    Raises
    ------
    NumericFailure
        If the mesh has no vertices or no faces; nothing is written.
    """
    if mesh.n_vertices == 0 or len(mesh.faces) == 0:
        raise NumericFailure("empty mesh, OBJ not written")
    lines = ["v {:.17g} {:.17g} {:.17g}".format(*map(float, v)) for v in mesh.vertices]
    lines += ["f {} {} {}".format(*(int(i) + 1 for i in f)) for f in mesh.faces]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_obj(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and 0-indexed faces of an OBJ file written by :func:`emit_obj`."""
    vs, fs = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("v "):
            vs.append([float(t) for t in line.split()[1:4]])
        elif line.startswith("f "):
            fs.append([int(t.split("/")[0]) - 1 for t in line.split()[1:4]])
    return np.array(vs), np.array(fs, dtype=int)
