"""Deterministic SVG output for patches. Coordinates are 12-significant-digit decimals."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .substitution import Patch, SubstitutionSystem

DEFAULT_PALETTE = {"base": "#e8c170", "reflected": "#6f9fd8"}


@dataclass
class RenderSpec:
    stroke_width: float = 0.02
    palette: dict = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    margin: float = 0.05  # fraction of the larger extent
    out: Path | None = None

    def fill(self, sys_: SubstitutionSystem, pid: int) -> str:
        if pid in self.palette:
            return self.palette[pid]
        return self.palette.get(sys_.proto(pid).chirality, "#cccccc")


def fmt(x: float) -> str:
    s = format(x, ".12g")
    return "0" if s == "-0" else s


def render_svg(sys_: SubstitutionSystem, patch: Patch, spec: RenderSpec | None = None) -> str:
    """SVG text for the patch, y axis pointing up, tiles in the patch's canonical order."""
    spec = spec or RenderSpec()
    polys = []
    for t in patch.tiles:
        pts = [(float(x), -float(y)) for x, y in sys_.tile_polygon(t)]
        polys.append((t.proto, pts))
    xs = [x for _, pts in polys for x, _ in pts] or [0.0]
    ys = [y for _, pts in polys for _, y in pts] or [0.0]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    pad = spec.margin * max(w, h, 1e-9)
    stroke = spec.stroke_width * max(w, h, 1.0) / 10
    vb = " ".join(fmt(v) for v in (min(xs) - pad, min(ys) - pad, w + 2 * pad, h + 2 * pad))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}" width="800" height="{fmt(800 * (h + 2 * pad) / (w + 2 * pad))}">',
        f'<g stroke="#222222" stroke-width="{fmt(stroke)}" stroke-linejoin="round">',
    ]
    for pid, pts in polys:
        coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in pts)
        lines.append(f'<polygon class="proto-{pid}" fill="{spec.fill(sys_, pid)}" points="{coords}"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def write_svg(sys_: SubstitutionSystem, patch: Patch, path: Path, spec: RenderSpec | None = None) -> None:
    Path(path).write_text(render_svg(sys_, patch, spec), encoding="utf-8")
