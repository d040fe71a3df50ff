"""Richardson extrapolation on geometric grids."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Extrapolated:
    value: complex
    error: float
    table: list


def richardson(values, ratio: float = 2.0, power: float = 1.0, max_cols: int = 6) -> Extrapolated:
    """Extrapolate s(h) -> s(0) from samples at h_k = h_0 / ratio**k.

    Assumes s(h) = L + c1 h^p + c2 h^(2p) + ...  Works on floats, complex
    numbers or mpmath numbers alike.  The reported error is the gap between
    the last two stages in the final row.
    """
    values = list(values)
    if len(values) < 2:
        raise ValueError("need at least two samples to extrapolate")
    table = [[values[0]]]
    for i in range(1, len(values)):
        row = [values[i]]
        for j in range(1, min(i, max_cols) + 1):
            f = ratio ** (j * power) - 1.0
            row.append(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / f)
        table.append(row)
    last = table[-1]
    prev = table[-2]
    m = min(len(last), len(prev)) - 1
    best = last[m]
    err = abs(best - prev[m]) if m >= 0 else float("inf")
    if len(last) > 1:
        err = max(err, abs(last[-1] - last[-2]))
    return Extrapolated(best, float(err), table)


def radial_grid(kmin: int, kmax: int) -> list[float]:
    """r_k = 1 - 2^-k, strictly increasing to 1."""
    return [1.0 - 2.0 ** (-k) for k in range(kmin, kmax + 1)]


@dataclass
class LimitScan:
    r: list
    values: list
    limit: complex
    error: float
    predicted: complex | None = None
    agreement: bool | None = None

    def csv_rows(self) -> list[list[str]]:
        rows = [["r", "value_re", "value_im", "abs_value"]]
        for r, v in zip(self.r, self.values):
            v = complex(v)
            rows.append([f"{r:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}", f"{abs(v):.17g}"])
        return rows

    def to_dict(self) -> dict:
        def pair(x):
            return None if x is None else [complex(x).real, complex(x).imag]

        return {
            "r_max": self.r[-1],
            "points": len(self.r),
            "limit": pair(self.limit),
            "error": self.error,
            "predicted": pair(self.predicted),
            "agreement": self.agreement,
        }


def scan_limit(r: list, values: list, power: float = 1.0, max_cols: int = 6) -> LimitScan:
    ext = richardson(values, ratio=2.0, power=power, max_cols=max_cols)
    return LimitScan(list(r), list(values), complex(ext.value), ext.error)
