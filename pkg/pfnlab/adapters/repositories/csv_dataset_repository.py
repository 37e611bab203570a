"""
CSV dataset repository.
Reads and writes UTF-8, comma-separated files whose first row is the header.
"""
import logging
import math
import os
import re
from typing import Any, List, Sequence

import numpy as np
import pandas as pd

from pfnlab.core.models.dataset import ColumnKind, ColumnSchema, Dataset, TaskKind, validate_schema
from pfnlab.core.models.errors import (
    ConfigurationError,
    DatasetNotFoundError,
    MissingTargetError,
    ParseError,
    SchemaMismatchError,
    TooManyClassesError,
    TooManyFeaturesError,
)
from pfnlab.core.ports.dataset_repository import DatasetRepositoryPort
from pfnlab.core.services.tabular_constraints import TabularConstraints

logger = logging.getLogger(__name__)

_PARSER_LINE = re.compile(r"line (\d+)")


class CsvDatasetRepository(DatasetRepositoryPort):
    """
    Missing cells are empty or the literal "NA". Row indices in errors are
    0-based data rows (the header is not counted).

    Args:
        max_features: Widest dataset accepted
        max_classes: Most distinct classification targets accepted
    """

    def __init__(
        self,
        max_features: int = TabularConstraints.MAX_FEATURES,
        max_classes: int = TabularConstraints.MAX_CLASSES,
    ):
        self.max_features = max_features
        self.max_classes = max_classes

    def load(self, path: str, schema: Sequence[ColumnSchema], task: TaskKind) -> Dataset:
        """
        Raises:
            DatasetNotFoundError: If the file does not exist
            SchemaMismatchError: On header or arity disagreement
            ParseError: On non-numeric or non-finite text in a numeric column
            MissingTargetError: On a missing target cell
            TooManyClassesError: If a classification target has too many values
            TooManyFeaturesError: If the schema has too many features
        """
        schema = tuple(schema)
        try:
            validate_schema(schema)
        except ValueError as error:
            raise ConfigurationError(str(error)) from error
        if not os.path.isfile(path):
            raise DatasetNotFoundError(path)

        frame = self._read_frame(path)
        header = [str(value) for value in frame.iloc[0].tolist()]
        expected = [column.name for column in schema]
        if header != expected:
            raise SchemaMismatchError(f"Header {header} does not match schema {expected}")

        body = frame.iloc[1:].reset_index(drop=True)
        short_rows = np.flatnonzero(body.isna().any(axis=1).to_numpy())
        if short_rows.size:
            row = int(short_rows[0])
            raise SchemaMismatchError(f"Row {row} has fewer fields than the schema", row_index=row)

        cells = np.empty(body.shape, dtype=object)
        for j, column in enumerate(schema):
            cells[:, j] = self._parse_column(body.iloc[:, j].tolist(), column)

        dataset = Dataset(schema=schema, cells=cells, task=TaskKind(task))
        self._check_limits(dataset)
        logger.info(
            "Loaded dataset",
            extra={"extra_fields": {
                "path": path,
                "rows": dataset.n_rows,
                "features": dataset.n_features,
                "missing_cells": int(dataset.missing_mask.sum()),
            }},
        )
        return dataset

    def _read_frame(self, path: str) -> pd.DataFrame:
        try:
            frame = pd.read_csv(
                path,
                header=None,
                dtype=str,
                keep_default_na=False,
                encoding="utf-8",
            )
        except pd.errors.EmptyDataError as error:
            raise SchemaMismatchError(f"{path} is empty") from error
        except pd.errors.ParserError as error:
            match = _PARSER_LINE.search(str(error))
            row = int(match.group(1)) - 2 if match else None
            raise SchemaMismatchError(f"Row arity disagrees with the header: {error}", row_index=row) from error
        return frame

    @staticmethod
    def _parse_column(values: List[str], column: ColumnSchema) -> List[Any]:
        parsed: List[Any] = []
        for row, value in enumerate(values):
            if TabularConstraints.is_missing_token(value):
                if column.is_target:
                    raise MissingTargetError(row)
                parsed.append(None)
            elif column.kind == ColumnKind.CATEGORICAL:
                parsed.append(value)
            else:
                try:
                    number = float(value)
                except ValueError:
                    raise ParseError(row, column.name, value) from None
                if not math.isfinite(number):
                    raise ParseError(row, column.name, value)
                parsed.append(number)
        return parsed

    def _check_limits(self, dataset: Dataset) -> None:
        if dataset.n_features > self.max_features:
            raise TooManyFeaturesError(dataset.n_features, self.max_features)
        if dataset.task == TaskKind.CLASSIFICATION:
            n_classes = len(set(dataset.targets()))
            if n_classes > self.max_classes:
                raise TooManyClassesError(n_classes, self.max_classes)

    def save(self, dataset: Dataset, path: str) -> None:
        """Numeric cells are written with full float precision, missing cells as "NA"."""
        token = TabularConstraints.MISSING_WRITE_TOKEN
        columns = {}
        for j, column in enumerate(dataset.schema):
            if column.kind == ColumnKind.CATEGORICAL:
                columns[column.name] = [token if value is None else str(value) for value in dataset.cells[:, j]]
            else:
                columns[column.name] = [token if value is None else repr(float(value)) for value in dataset.cells[:, j]]

        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        pd.DataFrame(columns, columns=[column.name for column in dataset.schema]).to_csv(
            path, index=False, encoding="utf-8"
        )
