"""
Per-dataset score normalization and the comparison table layout.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence

from pfnlab.core.models.errors import InsufficientVariantsError
from pfnlab.core.models.scores import CATEGORIES, ScoreEntry, ScoreTable, VariantSpec

logger = logging.getLogger(__name__)

CATEGORY_HEADERS = {
    "classification/mixed": "clf-mixed",
    "classification/numerical": "clf-numerical",
    "regression/mixed": "reg-mixed",
    "regression/numerical": "reg-numerical",
}


def _usable(value: Optional[float]) -> bool:
    return value is not None and math.isfinite(value)


def normalize_scores(raw: ScoreTable, min_variants: int = 2, strict: bool = True) -> ScoreTable:
    """
    Min-max normalize each dataset's scores across variants and average them
    per (variant, category).

    Cells without a finite raw score are left unnormalized and skipped. A
    dataset whose scores are all equal normalizes to 1 everywhere.

    Args:
        raw: Raw scores, None for failed cells
        min_variants: Finite scores a dataset needs to be normalized
        strict: Raise on a short dataset instead of leaving it unnormalized

    Raises:
        InsufficientVariantsError: If `strict` and a dataset has fewer than
            `min_variants` finite scores
    """
    entries: List[ScoreEntry] = []
    for dataset_id in raw.dataset_ids:
        cells = [entry for entry in raw.entries if entry.dataset_id == dataset_id]
        scores = [entry.raw for entry in cells if _usable(entry.raw)]
        failed = [entry.variant_id for entry in cells if not _usable(entry.raw)]
        if failed:
            logger.warning(
                "Excluding failed cells from normalization",
                extra={"extra_fields": {"dataset": dataset_id, "variants": failed}},
            )
        if len(scores) < min_variants:
            if strict:
                raise InsufficientVariantsError(
                    f"Dataset {dataset_id!r} has {len(scores)} finite scores, need {min_variants}",
                    dataset=dataset_id,
                )
            logger.warning(
                "Dataset left unnormalized",
                extra={"extra_fields": {"dataset": dataset_id, "finite_scores": len(scores)}},
            )
            entries.extend(cells)
            continue
        low, high = min(scores), max(scores)
        for entry in cells:
            normalized = None
            if _usable(entry.raw):
                normalized = 1.0 if high == low else (entry.raw - low) / (high - low)
            entries.append(ScoreEntry(entry.dataset_id, entry.variant_id, entry.category, entry.raw, normalized))

    aggregates: Dict[tuple, float] = {}
    groups: Dict[tuple, List[float]] = {}
    for entry in entries:
        if entry.normalized is not None:
            groups.setdefault((entry.variant_id, entry.category), []).append(entry.normalized)
    for key, values in groups.items():
        aggregates[key] = sum(values) / len(values)

    return ScoreTable(entries=entries, aggregates=aggregates)


def retrieval_label(size: int) -> str:
    """1000 -> '1k', 10000 -> '10k'."""
    if size % 1000 == 0:
        return f"{size // 1000}k"
    return str(size)


def comparison_rows(table: ScoreTable, variants: Sequence[VariantSpec]) -> List[Dict[str, str]]:
    """One row per variant with method flags and per-category aggregates."""
    rows = []
    for variant in variants:
        row = {
            "variant": variant.name,
            "method": variant.method.display_name,
            "pretrain": "yes" if variant.pretrained else "no",
            "fine-tune": "yes" if variant.finetuned else "no",
            "# retrieval": retrieval_label(variant.inference.retrieval_size),
        }
        for category in CATEGORIES:
            value = table.aggregate(variant.name, category)
            row[CATEGORY_HEADERS[category]] = "-" if value is None else f"{value:.4f}"
        rows.append(row)
    return rows


def render_table(rows: List[Dict[str, str]]) -> str:
    """Aligned plain-text table: header, rule, one line per row."""
    if not rows:
        return ""
    columns = list(rows[0].keys())
    widths = {column: max(len(column), *(len(row[column]) for row in rows)) for column in columns}
    header = "  ".join(column.ljust(widths[column]) for column in columns)
    rule = "  ".join("-" * widths[column] for column in columns)
    lines = ["  ".join(row[column].ljust(widths[column]) for column in columns) for row in rows]
    return "\n".join([header, rule] + lines) + "\n"
