"""
matrix_io.py
File formats of the subspaces app.

Matrix file: plain text. The first non-comment line is "rows cols"; the
remaining tokens are the entries in row-major order, any number per line.
Lines starting with '#' are ignored.

Report: "key: value" lines in a fixed order, "timing.<stage>: seconds"
lines, then an "eigenvalues" table. Sweep: one row per cell, as CSV or XLSX.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from .exceptions import InvalidInputError
from .linalg import Matrix, as_matrix
from .utils import format_value

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    'bits', 'shots', 'classical_value', 'quantum_estimate', 'abs_error', 'ideal_p0', 'exact_p0',
    'sampled_p0', 'phase_error', 'sampling_error', 'epsilon_p', 'leakage_bound', 'leaked_mass',
)
EIGEN_COLUMNS = ('index', 'lambda', 'lambda_tilde', 'bin_mass')


def parse_matrix(text: str, source: str = 'matrix') -> Matrix:
    """
    Parse the matrix file format.
    Raises:
        InvalidInputError: on a malformed header, a non-numeric token, or an entry count mismatch.
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith('#')]
    if not lines:
        raise InvalidInputError(f'{source}: empty matrix file')
    header = lines[0].split()
    try:
        rows, cols = (int(token) for token in header)
    except ValueError:
        raise InvalidInputError(f"{source}: header must be 'rows cols', got '{lines[0]}'")
    if rows < 1 or cols < 1:
        raise InvalidInputError(f'{source}: dimensions must be positive, got {rows}x{cols}')
    tokens = ' '.join(lines[1:]).split()
    if len(tokens) != rows * cols:
        raise InvalidInputError(f'{source}: expected {rows * cols} entries, found {len(tokens)}')
    try:
        entries = [float(token) for token in tokens]
    except ValueError as e:
        raise InvalidInputError(f'{source}: {e}')
    return as_matrix(np.array(entries).reshape(rows, cols), source)


def read_matrix(path) -> Matrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InvalidInputError(f'cannot read matrix file {path}: {e}')
    return parse_matrix(text, str(path))


def format_matrix(mat, comment: Optional[str] = None) -> str:
    mat = as_matrix(mat)
    if np.any(mat.imag != 0):
        raise InvalidInputError('the matrix file format holds real entries only')
    lines = [f'# {comment}'] if comment else []
    lines.append(f'{mat.shape[0]} {mat.shape[1]}')
    for row in mat.real:
        lines.append(' '.join(repr(float(value)) for value in row))
    return '\n'.join(lines) + '\n'


def write_matrix(path, mat, comment: Optional[str] = None):
    Path(path).write_text(format_matrix(mat, comment))
    logger.debug(f'wrote matrix {np.shape(mat)} to {path}')


def render_report(report, include_timings: bool = True) -> str:
    """The report document for a PipelineReport."""
    lines = [f'{key}: {format_value(value)}' for key, value in report.fields()]
    if include_timings:
        lines.extend(f'timing.{stage}: {seconds:.6f}' for stage, seconds in report.timings.items())
    lines.append('eigenvalues:')
    lines.append(', '.join(EIGEN_COLUMNS))
    for row in report.eigenvalues:
        lines.append(', '.join(format_value(value) for value in (row.index, row.value, row.estimate, row.bin_mass)))
    return '\n'.join(lines) + '\n'


def write_report(report, path):
    Path(path).write_text(render_report(report))


def sweep_frame(rows: Iterable[Dict[str, object]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=list(SWEEP_COLUMNS))


def write_sweep(rows: List[Dict[str, object]], path):
    """Write sweep rows as CSV, or as XLSX when the path ends in .xlsx."""
    path = Path(path)
    frame = sweep_frame(rows)
    if path.suffix.lower() == '.xlsx':
        frame.to_excel(path, index=False, sheet_name='sweep', engine='openpyxl')
    elif path.suffix.lower() == '.csv':
        frame.to_csv(path, index=False)
    else:
        raise InvalidInputError(f'sweep output must end in .csv or .xlsx, got {path.name}')
    logger.info(f'wrote {len(frame)} sweep rows to {path}')
