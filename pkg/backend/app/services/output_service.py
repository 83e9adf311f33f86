# backend/app/services/output_service.py
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Sequence, TextIO

import numpy as np
import pandas as pd
from scipy import sparse

from app.core.exceptions import OutputError
from app.models.operators import OperatorMatrix

logger = logging.getLogger(__name__)


def _write_atomic(path: Path, text: str) -> None:
    """Write through a temp file in the target directory, then rename over the target."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise OutputError(f"failed to write {path}: {e}") from e
    logger.info(f"wrote {path}")


def frame_to_csv(frame: pd.DataFrame, stream: TextIO = None) -> str:
    # pandas writes floats with repr, the shortest round-trip form
    return frame.to_csv(stream, index=False, lineterminator="\n")


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    _write_atomic(path, frame_to_csv(frame))


def write_json(payload: Dict, path: Path) -> None:
    _write_atomic(path, json.dumps(payload, sort_keys=True) + "\n")


def occupations_frame(times: Sequence[float], occupations: List[np.ndarray]) -> pd.DataFrame:
    K = len(occupations[0]) if occupations else 0
    frame = pd.DataFrame(np.vstack(occupations) if occupations else np.empty((0, K)),
                         columns=[f"n_{k}" for k in range(1, K + 1)])
    frame.insert(0, "time", np.asarray(times, dtype=float))
    return frame


def entropy_frame(times: Sequence[float], normalized: Sequence[float], unnormalized: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({
        "time": np.asarray(times, dtype=float),
        "S_fock_normalized": np.asarray(normalized, dtype=float),
        "S_unnormalized": np.asarray(unnormalized, dtype=float),
    })


def state_frame(times: Sequence[float], amplitudes: List[np.ndarray]) -> pd.DataFrame:
    """time, re_1, im_1, ..., re_d, im_d"""
    stacked = np.vstack(amplitudes)
    columns = {"time": np.asarray(times, dtype=float)}
    for m in range(stacked.shape[1]):
        columns[f"re_{m + 1}"] = stacked[:, m].real
        columns[f"im_{m + 1}"] = stacked[:, m].imag
    return pd.DataFrame(columns)


def operator_triplets(op: OperatorMatrix) -> Dict:
    """Sparse triplets of an operator, sorted row-major, explicit zeros dropped."""
    coo = sparse.coo_matrix(op.entries)
    keep = coo.data != 0
    rows, cols, data = coo.row[keep], coo.col[keep], coo.data[keep]
    order = np.lexsort((cols, rows))
    return {
        "space": op.space.value,
        "dim": op.dim,
        "rows": rows[order].tolist(),
        "cols": cols[order].tolist(),
        "re": np.real(data[order]).tolist(),
        "im": np.imag(data[order]).tolist(),
    }
