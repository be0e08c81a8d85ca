"""Frame rendering: the error-field heatmap with agent and target glyphs,
written as binary portable pixmaps (P6) so runs have zero codec
dependencies. Downstream tooling can assemble videos from the frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Single-hue ramp endpoints: white (zero error) to deep red (max error).
_RAMP_LOW = np.array([255.0, 255.0, 255.0])
_RAMP_HIGH = np.array([178.0, 24.0, 24.0])
_AGENT_COLOR = np.array([20.0, 20.0, 20.0])
_TARGET_COLOR = np.array([30.0, 60.0, 235.0])
_DISK_COLOR = np.array([128.0, 128.0, 128.0])


@dataclass(frozen=True)
class FrameSpec:
    """Pixel geometry and styling for rendered frames.

    ``field_max`` fixes the heatmap normalization for a whole run (use the
    max of the field at the first frame so brightness is comparable across
    frames); None normalizes each frame on its own.
    """

    width: int = 512
    height: int = 512
    glyph_radius: int = 3
    sensing_disk: bool = False
    field_max: float | None = None

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValueError("frame dimensions must be at least 64x64")


def _to_pixels(points, bounds, width, height):
    """World coordinates to (col, row) pixel coordinates (row 0 at top)."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    col = (p[:, 0] - bounds.xmin) / bounds.width * width
    row = (bounds.ymax - p[:, 1]) / bounds.height * height
    return np.column_stack([col, row])


def _stamp_disk(img, center, radius, color, alpha=1.0):
    h, w = img.shape[:2]
    c0, r0 = center
    x0, x1 = max(0, int(c0 - radius - 1)), min(w, int(c0 + radius + 2))
    y0, y1 = max(0, int(r0 - radius - 1)), min(h, int(r0 + radius + 2))
    if x0 >= x1 or y0 >= y1:
        return
    xs = np.arange(x0, x1) + 0.5
    ys = np.arange(y0, y1) + 0.5
    mask = (xs[None, :] - c0) ** 2 + (ys[:, None] - r0) ** 2 <= radius ** 2
    patch = img[y0:y1, x0:x1]
    patch[mask] = (1.0 - alpha) * patch[mask] + alpha * color


def _stamp_cross(img, center, arm, color):
    h, w = img.shape[:2]
    c0, r0 = int(round(center[0])), int(round(center[1]))
    for dc, dr in ((1, 0), (0, 1)):
        for k in range(-arm, arm + 1):
            x, y = c0 + dc * k, r0 + dr * k
            for t in (-1, 0, 1):
                xx = x + (t if dc == 0 else 0)
                yy = y + (t if dr == 0 else 0)
                if 0 <= xx < w and 0 <= yy < h:
                    img[yy, xx] = color


def render_frame(world, field: np.ndarray | None, spec: FrameSpec) -> bytes:
    """Render one frame: heatmap underlay (if a field is given), agent dots,
    active-target crosses, and optionally agent 0's sensing disk. Returns
    P6 bytes."""
    w, h = spec.width, spec.height
    bounds = world.grid.bounds

    if field is not None:
        field = np.asarray(field, dtype=float)
        if field.size == 0:
            raise ValueError("field must be a nonempty 2D array")
        scale = spec.field_max if spec.field_max else float(field.max())
        if scale <= 0:
            scale = 1.0
        t = np.clip(field / scale, 0.0, 1.0)
        # Nearest-cell sampling from the metrics grid to the pixel raster;
        # grid row 0 is ymin, image row 0 is ymax.
        rows = np.minimum((np.arange(h) + 0.5) * field.shape[0] / h,
                          field.shape[0] - 1).astype(int)[::-1]
        cols = np.minimum((np.arange(w) + 0.5) * field.shape[1] / w,
                          field.shape[1] - 1).astype(int)
        tt = t[np.ix_(rows, cols)]
        img = _RAMP_LOW[None, None, :] + tt[:, :, None] * (_RAMP_HIGH - _RAMP_LOW)
    else:
        img = np.full((h, w, 3), 255.0)

    if spec.sensing_disk and world.n_agents:
        center = _to_pixels(world.positions[0], bounds, w, h)[0]
        radius = world.dynamics.sensing_range / bounds.width * w
        _stamp_disk(img, center, radius, _DISK_COLOR, alpha=0.3)

    for t_ in world.targets:
        if t_.active:
            c = _to_pixels(t_.position, bounds, w, h)[0]
            _stamp_cross(img, c, spec.glyph_radius + 3, _TARGET_COLOR)

    for px in _to_pixels(world.positions, bounds, w, h) if world.n_agents else []:
        _stamp_disk(img, px, spec.glyph_radius, _AGENT_COLOR)

    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + np.clip(img, 0, 255).astype(np.uint8).tobytes()
