"""Static SVG figures: PCA scatter of embeddings and a histogram of absolute
prediction errors. Output depends only on the input values.
"""

from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from convembed.eval.report import PCARow

WIDTH, HEIGHT, PAD = 480, 360, 40

GROUP_STYLES = {
    "low": ('<circle cx="{x:.2f}" cy="{y:.2f}" r="4" class="low"/>', "#1f77b4"),
    "high": ('<circle cx="{x:.2f}" cy="{y:.2f}" r="4" class="high"/>', "#d62728"),
    "test": (
        '<rect x="{x0:.2f}" y="{y0:.2f}" width="6" height="6" class="test"/>',
        "#7f7f7f",
    ),
    "test-low": (
        '<rect x="{x0:.2f}" y="{y0:.2f}" width="6" height="6" class="test-low"/>',
        "#9ecae1",
    ),
    "test-high": (
        '<rect x="{x0:.2f}" y="{y0:.2f}" width="6" height="6" class="test-high"/>',
        "#fc9272",
    ),
}
DRAW_ORDER = ("test", "test-low", "test-high", "low", "high")


def _scale(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    vmin, vmax = float(values.min()), float(values.max())
    if vmax == vmin:
        return np.full(values.shape, (lo + hi) / 2.0)
    return lo + (values - vmin) * (hi - lo) / (vmax - vmin)


def _document(title: str, body: List[str]) -> str:
    styles = "".join(f".{g}{{fill:{color};}}" for g, (_, color) in GROUP_STYLES.items())
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f"<style>{styles}.bar{{fill:#4c72b0;}}text{{font:12px sans-serif;}}</style>",
            f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle">{escape(title)}</text>',
            f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
            f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
            *body,
            "</svg>",
            "",
        ]
    )


def marker_group(row: PCARow, test_split: Optional[Tuple[float, float]] = None) -> str:
    if row.group != "test" or test_split is None:
        return row.group
    low, high = test_split
    if row.score <= low:
        return "test-low"
    if row.score >= high:
        return "test-high"
    return "test"


def pca_scatter_svg(
    rows: Sequence[PCARow],
    title: str = "Conversation embeddings (PC1 vs PC2)",
    test_split: Optional[Tuple[float, float]] = None,
) -> str:
    """Training groups as circles, test conversations as squares.

    With test_split = (low, high), test conversations scored at most low or at
    least high get their own colors.
    """
    pc1 = np.array([r.pc1 for r in rows])
    pc2 = np.array([r.pc2 for r in rows])
    xs = _scale(pc1, PAD, WIDTH - PAD)
    ys = _scale(pc2, HEIGHT - PAD, PAD)
    groups = [marker_group(row, test_split) for row in rows]
    body = []
    for group in DRAW_ORDER:
        template = GROUP_STYLES[group][0]
        for row_group, x, y in zip(groups, xs, ys):
            if row_group == group:
                body.append(template.format(x=x, y=y, x0=x - 3.0, y0=y - 3.0))
    body.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 8}" text-anchor="middle">PC1</text>')
    body.append(f'<text x="12" y="{HEIGHT / 2:.0f}" transform="rotate(-90 12 {HEIGHT / 2:.0f})">PC2</text>')
    return _document(title, body)


def histogram_bins(values: Sequence[float], bin_width: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=np.float64)
    top = max(bin_width, float(np.ceil(values.max() / bin_width) * bin_width)) if values.size else bin_width
    edges = np.arange(0.0, top + bin_width / 2.0, bin_width)
    counts, _ = np.histogram(values, bins=edges)
    return counts, edges


def histogram_svg(
    values: Sequence[float], bin_width: float = 1.0, title: str = "Absolute prediction differences"
) -> str:
    counts, edges = histogram_bins(values, bin_width)
    n_bins = len(counts)
    bar_width = (WIDTH - 2 * PAD) / n_bins
    peak = max(int(counts.max()), 1) if n_bins else 1
    body = []
    for i, count in enumerate(counts):
        height = (HEIGHT - 2 * PAD) * count / peak
        x = PAD + i * bar_width
        body.append(
            f'<rect x="{x:.2f}" y="{HEIGHT - PAD - height:.2f}" width="{bar_width:.2f}" '
            f'height="{height:.2f}" class="bar"><title>[{edges[i]:g}, {edges[i + 1]:g}): {count}</title></rect>'
        )
    for i in range(0, n_bins + 1, max(1, n_bins // 8)):
        body.append(
            f'<text x="{PAD + i * bar_width:.2f}" y="{HEIGHT - PAD + 14}" text-anchor="middle">{edges[i]:g}</text>'
        )
    return _document(title, body)
