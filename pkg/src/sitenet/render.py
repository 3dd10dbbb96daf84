"""Grid-to-image rendering.

Maps are written as binary portable pixmaps (P6) with exactly one pixel
per cell, plus a ``<name>.legend.txt`` sidecar describing the color
assignment; a PNG twin can be requested.  Categorical grids cycle the
palette over their sorted codes, numeric grids are binned into at most
nine equal-interval classes.  Nodata (and non-finite) cells render in
the reserved white.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from sitenet.errors import InputDataError
from sitenet.grids import CategoricalGrid, NumericGrid, format_number

NODATA_RGB = (255, 255, 255)

PALETTES: dict[str, list[tuple[int, int, int]]] = {
    # Qualitative, for label/code grids; first entry backs code 0.
    "labels": [
        (235, 235, 235),
        (27, 158, 119), (217, 95, 2), (117, 112, 179), (231, 41, 138),
        (102, 166, 30), (230, 171, 2), (166, 118, 29), (102, 102, 102),
    ],
    # Sequential light-to-dark greens.
    "greens": [
        (247, 252, 245), (229, 245, 224), (199, 233, 192), (161, 217, 155),
        (116, 196, 118), (65, 171, 93), (35, 139, 69), (0, 109, 44), (0, 68, 27),
    ],
    # Sequential yellow-to-red, suits friction and cost surfaces.
    "heat": [
        (255, 255, 204), (255, 237, 160), (254, 217, 118), (254, 178, 76),
        (253, 141, 60), (252, 78, 42), (227, 26, 28), (189, 0, 38), (128, 0, 38),
    ],
}


def _palette(name: str) -> list[tuple[int, int, int]]:
    try:
        return PALETTES[name]
    except KeyError:
        raise InputDataError(
            f"unknown palette {name!r}; available: {', '.join(sorted(PALETTES))}"
        ) from None


def render_map(
    grid: CategoricalGrid | NumericGrid,
    palette: str,
    path,
    classes: int = 9,
    png_path=None,
) -> np.ndarray:
    """Render a grid to ``path`` (PPM) and its legend sidecar.

    Returns the RGB pixel array.  ``classes`` caps the number of bins
    for numeric grids (at most 9).
    """
    colors = _palette(palette)
    if not 1 <= classes <= 9:
        raise InputDataError(f"classes must be between 1 and 9, got {classes}")

    nrows, ncols = grid.header.shape
    rgb = np.empty((nrows, ncols, 3), dtype=np.uint8)
    rgb[:] = NODATA_RGB
    legend = [f"palette: {palette}", f"nodata: rgb{NODATA_RGB}"]

    if isinstance(grid, CategoricalGrid):
        shown = ~grid.nodata_mask
        for idx, code in enumerate(grid.codes()):
            color = colors[idx % len(colors)]
            rgb[shown & (grid.values == code)] = color
            legend.append(f"{code} -> rgb{color}")
    else:
        finite = ~grid.nodata_mask & np.isfinite(grid.values)
        if finite.any():
            vmin = float(grid.values[finite].min())
            vmax = float(grid.values[finite].max())
            n_bins = 1 if vmin == vmax else min(classes, len(colors))
            width = (vmax - vmin) / n_bins if n_bins else 0.0
            # Bin index by value; the top edge folds into the last class.
            bins = np.zeros(grid.header.shape, dtype=np.int64)
            if vmin != vmax:
                scaled = (grid.values[finite] - vmin) / width
                bins[finite] = np.clip(scaled.astype(np.int64), 0, n_bins - 1)
            for b in range(n_bins):
                color = colors[b % len(colors)]
                rgb[finite & (bins == b)] = color
                lo, hi = vmin + b * width, vmin + (b + 1) * width
                closer = "]" if b == n_bins - 1 else ")"
                legend.append(
                    f"class {b + 1}: [{format_number(lo)}, {format_number(hi)}{closer} -> rgb{color}"
                )
        else:
            legend.append("no finite values")

    _write_ppm(rgb, path)
    Path(f"{path}.legend.txt").write_text("\n".join(legend) + "\n")
    if png_path is not None:
        from PIL import Image

        Image.fromarray(rgb, mode="RGB").save(png_path, format="PNG")
    return rgb


def _write_ppm(rgb: np.ndarray, path) -> None:
    nrows, ncols = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{ncols} {nrows}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
