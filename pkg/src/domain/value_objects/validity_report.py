"""기하 유효성 리포트 값 객체."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ValidityReport:
    """잔기별 기하 유효성."""

    per_residue: np.ndarray
    """(n_res,) bool. 마스크된 잔기는 False."""

    fraction_valid: float
    """유효 잔기 비율 (마스크되지 않은 잔기 기준, 0..1)."""
