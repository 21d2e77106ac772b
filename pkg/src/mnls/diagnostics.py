"""Time series container, CSV emission, and config hashing.

CSV contract: first line header, comma-separated lowercase snake_case
names, doubles with 17 significant digits, data rows only (metadata goes
to a sidecar).  The run-series column set and order are part of the
public schema and are pinned in RUN_COLUMNS.
"""

import hashlib

import numpy as np

__all__ = ["DiagnosticsSeries", "RUN_COLUMNS", "config_hash"]

RUN_COLUMNS = ("t", "l2", "sigma0_s", "z", "s_norm", "s_plus",
               "mass", "level_energy", "ang_momentum", "xT_diag", "flags")


def _fmt(x):
    return f"{float(x):.17g}"


class DiagnosticsSeries:
    """Named columns of doubles plus run metadata.

    Columns prefixed with an underscore are in-memory only (derivative
    surrogates and similar) and are not written to CSV.
    """

    def __init__(self, columns=None, meta=None):
        self.columns = {k: list(v) for k, v in (columns or {}).items()}
        self.meta = dict(meta or {})

    def append_row(self, **values):
        for k, v in values.items():
            self.columns.setdefault(k, []).append(float(v))
        n = {len(v) for v in self.columns.values()}
        if len(n) != 1:
            raise ValueError("ragged diagnostics row: missing column value")

    def column(self, name):
        for key in (name, "_" + name):
            if key in self.columns:
                return np.asarray(self.columns[key])
        raise KeyError(f"no column {name!r}")

    def __len__(self):
        if not self.columns:
            return 0
        return len(next(iter(self.columns.values())))

    @property
    def public_names(self):
        return [k for k in self.columns if not k.startswith("_")]

    def to_csv(self, path):
        names = self.public_names
        lines = [",".join(names)]
        for i in range(len(self)):
            lines.append(",".join(_fmt(self.columns[k][i]) for k in names))
        data = "\n".join(lines) + "\n"
        with open(path, "w", newline="") as fh:
            fh.write(data)
        return data

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            cols = {k: [] for k in header}
            for line in fh:
                if not line.strip():
                    continue
                for k, v in zip(header, line.strip().split(",")):
                    cols[k].append(float(v))
        return cls(cols)


def config_hash(mapping):
    """Reproducible hash of a flat key=value configuration."""
    payload = "\n".join(f"{k}={mapping[k]}" for k in sorted(mapping))
    return hashlib.sha256(payload.encode()).hexdigest()
