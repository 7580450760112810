"""Render slices of a crooked tiling as SVG 1.1.

A scene holds one entry per tile face: the zigzag cut out of ``gamma C_i^j``
by a horizontal plane, in slice coordinates ``(x1, x2)``.  Entries are
ordered by word then face key and coordinates are printed with fixed
precision, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .affine import AffineSchottkyConfig, enumerate_tiles
from .schottky import key_name
from .words import Word
from .zigzag import DefinitePlane, slice_plane

WIDTH = 800.0
STROKE = 1.5
PALETTE_STEP = 47.0


def clip_segment(p, q, viewport) -> tuple[np.ndarray, np.ndarray] | None:
    """Liang-Barsky clip of the segment ``p -> q`` to ``(xmin, xmax, ymin, ymax)``."""
    xmin, xmax, ymin, ymax = viewport
    d = q - p
    t0, t1 = 0.0, 1.0
    for pk, qk in ((-d[0], p[0] - xmin), (d[0], xmax - p[0]), (-d[1], p[1] - ymin), (d[1], ymax - p[1])):
        if pk == 0.0:
            if qk < 0.0:
                return None
            continue
        r = qk / pk
        if pk < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return p + t0 * d, p + t1 * d


def clip_polyline(pts: np.ndarray, viewport) -> list[np.ndarray]:
    """Visible runs of a polyline; consecutive clipped segments are joined."""
    runs: list[list[np.ndarray]] = []
    cur: list[np.ndarray] = []
    for p, q in zip(pts[:-1], pts[1:]):
        seg = clip_segment(p, q, viewport)
        if seg is None:
            if cur:
                runs.append(cur)
                cur = []
            continue
        a, b = seg
        if cur and np.allclose(cur[-1], a, rtol=0.0, atol=1e-12):
            cur.append(b)
        else:
            if cur:
                runs.append(cur)
            cur = [a, b]
        if not np.array_equal(b, q):
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return [np.array(r) for r in runs if len(r) >= 2]


@dataclass(frozen=True)
class ScenePolyline:
    word: Word
    key: tuple[int, int]
    points: np.ndarray

    @property
    def length(self) -> int:
        return len(self.word)


@dataclass
class SvgScene:
    viewport: tuple[float, float, float, float]
    polylines: list = field(default_factory=list)
    level: float = 0.0

    def __post_init__(self):
        xmin, xmax, ymin, ymax = (float(v) for v in self.viewport)
        if not (xmin < xmax and ymin < ymax) or not all(map(math.isfinite, (xmin, xmax, ymin, ymax))):
            raise ValueError(f"bad viewport {self.viewport}")
        self.viewport = (xmin, xmax, ymin, ymax)

    def add(self, word: Word, key, points) -> None:
        pts = np.asarray(points, dtype=float)
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"non-finite coordinates in face {word} {key}")
        self.polylines.append(ScenePolyline(word, tuple(key), pts))

    def ordered(self) -> list[ScenePolyline]:
        return sorted(self.polylines, key=lambda p: (p.word.sort_key, p.key[0], -p.key[1]))

    def to_screen(self, pts: np.ndarray) -> np.ndarray:
        xmin, xmax, ymin, ymax = self.viewport
        s = WIDTH / (xmax - xmin)
        return np.stack([(pts[:, 0] - xmin) * s, (ymax - pts[:, 1]) * s], axis=1)

    @property
    def height(self) -> float:
        xmin, xmax, ymin, ymax = self.viewport
        return WIDTH * (ymax - ymin) / (xmax - xmin)

    def render(self) -> str:
        items = self.ordered()
        depth = max((p.length for p in items), default=0)
        h = self.height
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0f}" height="{h:.2f}" '
            f'viewBox="0 0 {WIDTH:.0f} {h:.2f}">',
            f"<desc>slice x3 = {self.level:.12g}; viewport {' '.join(f'{v:.12g}' for v in self.viewport)}</desc>",
            "<style>",
            f"polyline {{ fill: none; stroke-width: {STROKE}; stroke-linejoin: round; }}",
        ]
        for n in range(depth + 1):
            out.append(f".len{n} {{ stroke: hsl({(n * PALETTE_STEP) % 360:.0f}, 70%, 40%); }}")
        out.append("</style>")
        out.append(f'<rect x="0" y="0" width="{WIDTH:.0f}" height="{h:.2f}" fill="white"/>')
        for p in items:
            out.append(f'<g class="zigzag len{p.length}" data-word="{p.word}" data-face="{key_name(p.key)}">')
            for run in clip_polyline(p.points, self.viewport):
                scr = self.to_screen(run)
                coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in scr)
                out.append(f'<polyline class="len{p.length}" points="{coords}"/>')
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _vertex_clearance(tiles, c: float) -> float:
    return min(abs(float(hs.vertex[2]) - c) for t in tiles for hs in t.half_spaces.values())


def safe_level(tiles, c: float, tol: float = 1e-9) -> tuple[float, bool]:
    """Move ``c`` off every tile vertex by a deterministic step; report whether it moved."""
    moved = False
    step = 1e-3 * max(1.0, abs(c))
    for _ in range(1000):
        if _vertex_clearance(tiles, c) > tol * max(1.0, abs(c)):
            return c, moved
        c += step
        moved = True
    raise ValueError("could not find a slice level avoiding the tile vertices")


def ray_length(scene: SvgScene, pts: np.ndarray) -> float:
    xmin, xmax, ymin, ymax = scene.viewport
    centre = np.array([(xmin + xmax) / 2, (ymin + ymax) / 2])
    diag = math.hypot(xmax - xmin, ymax - ymin)
    return 2.0 * (diag + float(np.max(np.linalg.norm(pts - centre, axis=1))))


def tile_scene(cfg: AffineSchottkyConfig, c: float, depth: int, viewport) -> tuple[SvgScene, float, bool]:
    """Zigzags of every tile face up to ``depth`` on ``{x3 = c}``.

    Returns the scene, the level actually used and whether it was perturbed.
    """
    tiles = enumerate_tiles(cfg, depth)
    c, moved = safe_level(tiles, float(c))
    plane = DefinitePlane.horizontal(c)
    scene = SvgScene(tuple(viewport), level=c)
    for t in tiles:
        for key, face in t.faces():
            z = slice_plane(face, plane)
            ends = np.array(z.points2d())
            scene.add(t.word, key, z.polyline(ray_length(scene, ends)))
    return scene, c, moved
