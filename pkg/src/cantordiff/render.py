"""Deterministic SVG output: interval stacks per depth and plane regions.

Fixed viewport math and fixed float formatting keep output byte-stable
across runs for identical inputs.
"""

from __future__ import annotations

from .ifs import LineIFS, union_at_depth
from .renorm import RecurrentRegion
from .scalars import Scalar

_W = 900.0
_H_PER_ROW = 46.0
_MARGIN = 40.0


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _approx(x: Scalar) -> float:
    lo, hi = x.float_enclosure(120)
    return (lo + hi) / 2


def render_interval_stack(ifs: LineIFS, depth: int, class_budget: int = 200_000) -> str:
    """Rows of depth-1..depth images of the hull, one SVG rect per interval."""
    hull_lo = _approx(ifs.hull.lo)
    hull_hi = _approx(ifs.hull.hi)
    span = hull_hi - hull_lo

    def sx(v: float) -> float:
        return _MARGIN + (v - hull_lo) / span * (_W - 2 * _MARGIN)

    height = _MARGIN * 2 + _H_PER_ROW * depth
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(_W)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(_W)} {_fmt(height)}">',
        f'<rect width="{_fmt(_W)}" height="{_fmt(height)}" fill="white"/>',
    ]
    for n in range(1, depth + 1):
        y = _MARGIN + (n - 1) * _H_PER_ROW
        out.append(
            f'<text x="{_fmt(8.0)}" y="{_fmt(y + 20.0)}" font-size="12" '
            f'font-family="monospace">n={n}</text>'
        )
        union = union_at_depth(ifs, n, class_budget)
        for iv in union:
            x0 = sx(_approx(iv.lo))
            x1 = sx(_approx(iv.hi))
            out.append(
                f'<rect x="{_fmt(x0)}" y="{_fmt(y + 8.0)}" '
                f'width="{_fmt(max(x1 - x0, 0.4))}" height="24.0000" '
                f'fill="#39618f" stroke="none"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_plane_regions(region: RecurrentRegion) -> str:
    """The recurrent set R with its boundary lines in the (s, t) plane.

    Also shades the escape band E (t > a or t < -b s) for context.
    """
    a = _approx(region.a)
    b = _approx(region.b)
    s_max = _approx(region.s_max)
    s_min = _approx(region.s_min)
    delta = _approx(region.delta)
    s_hi = s_max * 1.15
    t_lo = -b * s_hi * 1.05
    t_hi = a * 1.25
    w, h = _W, 560.0

    def sx(s: float) -> float:
        return _MARGIN + s / s_hi * (w - 2 * _MARGIN)

    def sy(t: float) -> float:
        return h - _MARGIN - (t - t_lo) / (t_hi - t_lo) * (h - 2 * _MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" '
        f'height="{_fmt(h)}" viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
    ]
    # escape band above t = a
    out.append(
        f'<rect x="{_fmt(sx(0.0))}" y="{_fmt(sy(t_hi))}" '
        f'width="{_fmt(sx(s_hi) - sx(0.0))}" height="{_fmt(sy(a) - sy(t_hi))}" '
        f'fill="#f3d6d6"/>'
    )
    # escape region below t = -b s
    out.append(
        f'<polygon points="{_fmt(sx(0.0))},{_fmt(sy(0.0))} '
        f'{_fmt(sx(s_hi))},{_fmt(sy(-b * s_hi))} '
        f'{_fmt(sx(s_hi))},{_fmt(sy(t_lo))} {_fmt(sx(0.0))},{_fmt(sy(t_lo))}" '
        f'fill="#f3d6d6"/>'
    )
    # recurrent region R between the boundary lines
    out.append(
        f'<polygon points="'
        f'{_fmt(sx(s_min))},{_fmt(sy(-b * s_min + delta))} '
        f'{_fmt(sx(s_max))},{_fmt(sy(-b * s_max + delta))} '
        f'{_fmt(sx(s_max))},{_fmt(sy(a - delta))} '
        f'{_fmt(sx(s_min))},{_fmt(sy(a - delta))}" '
        f'fill="#8fb68f" fill-opacity="0.8"/>'
    )
    # guide lines t = a and t = -b s
    out.append(
        f'<line x1="{_fmt(sx(0.0))}" y1="{_fmt(sy(a))}" x2="{_fmt(sx(s_hi))}" '
        f'y2="{_fmt(sy(a))}" stroke="#a33" stroke-width="1.0"/>'
    )
    out.append(
        f'<line x1="{_fmt(sx(0.0))}" y1="{_fmt(sy(0.0))}" x2="{_fmt(sx(s_hi))}" '
        f'y2="{_fmt(sy(-b * s_hi))}" stroke="#a33" stroke-width="1.0"/>'
    )
    out.append(
        f'<text x="{_fmt(sx(s_min))}" y="{_fmt(sy(a - delta) - 6.0)}" '
        f'font-size="12" font-family="monospace">R</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
