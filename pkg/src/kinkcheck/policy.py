"""Central tolerance policy.

Every verdict produced by the package is computed under one of these objects
and reports carry a copy of it, so a result can always be reproduced.
"""

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    eps_act
        Absolute threshold below which a switching variable, an inequality
        value or a complementarity variable counts as zero (active).
    eps_rank
        Relative singular-value cutoff; the rank threshold is
        ``eps_rank * max(rows, cols) * sigma_max``.
    eps_strict
        Minimal LP margin for a strictly interior direction.
    eps_psd
        Relative eigenvalue threshold for definiteness classes,
        ``eps_psd * (1 + max |lambda|)``.
    eps_resid
        Relative residual tolerance for stationarity and critical-direction
        equations.
    """

    eps_act: float = 1e-8
    eps_rank: float = 1e-10
    eps_strict: float = 1e-8
    eps_psd: float = 1e-8
    eps_resid: float = 1e-8

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(cls(), **{k: float(v) for k, v in data.items()})


DEFAULT = Tolerances()
