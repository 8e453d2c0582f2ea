"""Stereographic projection of sampled surfaces and mesh/CSV writers."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from berger_helix.errors import ConfigurationError

POLE_TOL = 1e-9


@dataclass(frozen=True)
class Pole:
    """Projection pole: coordinate ``axis`` (0-based) with ``sign`` +-1."""

    axis: int = 3
    sign: int = -1

    def __post_init__(self):
        if self.axis not in range(4) or self.sign not in (1, -1):
            raise ConfigurationError(f"invalid pole axis={self.axis!r} sign={self.sign!r}")

    @classmethod
    def parse(cls, text: str) -> "Pole":
        """Parse ``"4-"`` style specs (1-based axis followed by a sign)."""
        text = text.strip()
        if len(text) != 2 or text[0] not in "1234" or text[1] not in "+-":
            raise ConfigurationError(f"pole must look like 4- or 1+, got {text!r}")
        return cls(int(text[0]) - 1, 1 if text[1] == "+" else -1)

    def __str__(self) -> str:
        return f"{self.axis + 1}{'+' if self.sign > 0 else '-'}"

    @property
    def others(self) -> list[int]:
        return [i for i in range(4) if i != self.axis]


def near_pole(p: np.ndarray, pole: Pole = Pole()) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    target = np.zeros(4)
    target[pole.axis] = pole.sign
    return np.linalg.norm(p - target, axis=-1) <= POLE_TOL


def stereographic(p: np.ndarray, pole: Pole = Pole()) -> np.ndarray:
    """Project from the pole onto the hyperplane through the origin.

    Points within ``POLE_TOL`` of the pole map to NaN; callers drop them.
    """
    p = np.asarray(p, dtype=float)
    denom = 1.0 - pole.sign * p[..., pole.axis]
    with np.errstate(divide="ignore", invalid="ignore"):
        y = p[..., pole.others] / denom[..., None]
    return np.where(near_pole(p, pole)[..., None], np.nan, y)


def inverse_stereographic(y: np.ndarray, pole: Pole = Pole()) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    p = np.empty(y.shape[:-1] + (4,))
    p[..., pole.others] = 2 * y / (1 + r2)[..., None]
    p[..., pole.axis] = pole.sign * (r2 - 1) / (r2 + 1)
    return p


@dataclass(frozen=True)
class MeshGrid:
    """Projected vertices, their ambient points and quad faces (0-based).

    ``dropped`` counts vertices removed for lying on the pole; faces touching
    a dropped vertex are removed as well.
    """

    vertices: np.ndarray
    ambient: np.ndarray
    faces: np.ndarray
    u: np.ndarray
    v: np.ndarray
    nu: np.ndarray
    resolution: tuple[int, int]
    dropped: int


def build_mesh(u_axis, v_axis, F: np.ndarray, nu: np.ndarray, pole: Pole = Pole()) -> MeshGrid:
    """Mesh over the tensor grid ``u_axis x v_axis`` with F of shape (nu, nv, 4)."""
    u_axis, v_axis = np.asarray(u_axis, dtype=float), np.asarray(v_axis, dtype=float)
    n, m = len(u_axis), len(v_axis)
    if n < 2 or m < 2:
        raise ConfigurationError(f"mesh needs at least 2x2 samples, got {n}x{m}")
    uu, vv = np.meshgrid(u_axis, v_axis, indexing="ij")
    flat_f = F.reshape(-1, 4)
    keep = ~near_pole(flat_f, pole)
    index = np.full(n * m, -1)
    index[keep] = np.arange(keep.sum())
    ids = np.arange(n * m).reshape(n, m)
    quads = np.stack([ids[:-1, :-1], ids[1:, :-1], ids[1:, 1:], ids[:-1, 1:]], axis=-1).reshape(-1, 4)
    quads = quads[np.all(keep[quads], axis=1)]
    return MeshGrid(
        vertices=stereographic(flat_f[keep], pole),
        ambient=flat_f[keep],
        faces=index[quads],
        u=uu.ravel()[keep],
        v=vv.ravel()[keep],
        nu=np.asarray(nu, dtype=float).reshape(-1)[keep],
        resolution=(n, m),
        dropped=int((~keep).sum()),
    )


def _fmt(x: float) -> str:
    x = float(x)
    return f"{0.0 if x == 0 else x:.9e}"


def write_obj(mesh: MeshGrid, out: io.TextIOBase, comment: str = "") -> None:
    if comment:
        out.write(f"# {comment}\n")
    for x, y, z in mesh.vertices:
        out.write(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}\n")
    for f in mesh.faces:
        out.write("f " + " ".join(str(i + 1) for i in f) + "\n")


def write_ply(mesh: MeshGrid, out: io.TextIOBase, comment: str = "") -> None:
    out.write("ply\nformat ascii 1.0\n")
    if comment:
        out.write(f"comment {comment}\n")
    out.write(f"element vertex {len(mesh.vertices)}\n")
    out.write("property double x\nproperty double y\nproperty double z\n")
    out.write(f"element face {len(mesh.faces)}\n")
    out.write("property list uchar int vertex_indices\nend_header\n")
    for x, y, z in mesh.vertices:
        out.write(f"{_fmt(x)} {_fmt(y)} {_fmt(z)}\n")
    for f in mesh.faces:
        out.write(f"{len(f)} " + " ".join(str(i) for i in f) + "\n")


CSV_HEADER = "u,v,F1,F2,F3,F4,nu"


def write_csv(mesh: MeshGrid, out: io.TextIOBase) -> None:
    out.write(CSV_HEADER + "\n")
    for uu, vv, f, n in zip(mesh.u, mesh.v, mesh.ambient, mesh.nu):
        out.write(",".join(_fmt(x) for x in (uu, vv, *f, n)) + "\n")


WRITERS = {"obj": write_obj, "ply": write_ply, "csv": lambda mesh, out, comment="": write_csv(mesh, out)}
