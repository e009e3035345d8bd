"""Lagrange multiplier containers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["MultiplierSet"]


def _vec(v):
    return np.asarray(v if v is not None else [], dtype=float).ravel()


@dataclass(frozen=True, eq=False)
class MultiplierSet:
    """``(lamE, lamI, lamZ)`` plus optional complementarity multipliers.

    On the abs-normal side ``lamE``, ``lamI``, ``lamZ`` belong to the
    equalities, inequalities and switching equations.  On a complementarity
    program the equality multipliers are ``concat(lamE, lamZ)`` in the row
    order of ``MpccProblem.eq``, ``lamI`` belongs to ``MpccProblem.ineq`` and
    ``muU``/``muV`` to the pair variables.
    """

    lamE: np.ndarray
    lamI: np.ndarray
    lamZ: np.ndarray
    muU: Optional[np.ndarray] = None
    muV: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("lamE", "lamI", "lamZ"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        for name in ("muU", "muV"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, _vec(getattr(self, name)))

    @classmethod
    def zeros(cls, m1, m2, s):
        return cls(np.zeros(m1), np.zeros(m2), np.zeros(s))

    def without_mu(self):
        return MultiplierSet(self.lamE.copy(), self.lamI.copy(), self.lamZ.copy())

    def __eq__(self, other):
        if not isinstance(other, MultiplierSet):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.array_equal(a, b)

        return all(same(getattr(self, k), getattr(other, k))
                   for k in ("lamE", "lamI", "lamZ", "muU", "muV"))

    def to_dict(self):
        out = {k: [float(x) for x in getattr(self, k)] for k in ("lamE", "lamI", "lamZ")}
        for k in ("muU", "muV"):
            if getattr(self, k) is not None:
                out[k] = [float(x) for x in getattr(self, k)]
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(data.get("lamE"), data.get("lamI"), data.get("lamZ"),
                   data.get("muU"), data.get("muV"))
