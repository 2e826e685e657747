"""Rate bounds for perfect k-hash codes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from decimal import Decimal

from .maximizer import CERTIFIED_K, compute_Mk

DISPLAY_SIG_DIGITS = 5

# Published values of the single-subcode method for k = 5..8.  Their
# derivation depends on a combination formula that is not reproduced here.
LITERATURE_SINGLE_SUBCODE = {5: 0.19079, 6: 0.092279, 7: 0.04279, 8: 0.019213}

# Stated rounded values for the new bounds, kept to flag disagreement with
# the formula (k = 6 is printed as 0.0875, the formula gives 0.087591...).
STATED_NEW_BOUNDS = {5: 0.1697, 6: 0.0875}


def fk_bound(k: int) -> float:
    """The classical k!/k^(k-1) bound."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return math.factorial(k) / k ** (k - 1)


def rate_bound_from_Mk(k: int, Mk: float) -> float:
    """(2/M_k + 1/log2(k/(k-3)))^-1, the bound obtained from max Psi = M_k."""
    if k <= 3:
        raise ValueError("the bound needs k >= 4")
    if not Mk > 0:
        raise ValueError("M_k must be positive")
    return 1.0 / (2.0 / Mk + 1.0 / math.log2(k / (k - 3)))


def round_up(x: float, sig: int = DISPLAY_SIG_DIGITS) -> str:
    """Round x upward to `sig` significant digits, as a display string.

    A value within 1e-9 (relative) of the grid is treated as on the grid, so
    an exact 0.192 stays 0.19200 rather than becoming 0.19201.
    """
    if x <= 0:
        raise ValueError("round_up expects a positive value")
    exp = math.floor(math.log10(x)) - sig + 1
    scaled = x / 10.0**exp
    n = round(scaled)
    if abs(scaled - n) > 1e-9 * scaled:
        n = math.ceil(scaled)
    return f"{n * 10.0**exp:.{max(0, -exp)}f}"


def _sig_digits(x: float) -> int:
    return len(Decimal(repr(x)).normalize().as_tuple().digits)


@dataclass
class BoundReport:
    k: int
    fk_bound: float
    M_k: float
    new_bound: float
    certified: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def stated_mismatch(self) -> bool:
        """True when the rounded-up formula value differs from the printed one."""
        stated = STATED_NEW_BOUNDS.get(self.k)
        if stated is None:
            return False
        return float(round_up(self.new_bound, _sig_digits(stated))) != stated


def bound_report(k: int) -> BoundReport:
    mk = compute_Mk(k)
    return BoundReport(
        k=k,
        fk_bound=fk_bound(k),
        M_k=mk.value,
        new_bound=rate_bound_from_Mk(k, mk.value),
        certified=k in CERTIFIED_K,
    )


def table_report(k_min: int, k_max: int) -> list[BoundReport]:
    if not 5 <= k_min <= k_max <= 9:
        raise ValueError("need 5 <= k_min <= k_max <= 9")
    return [bound_report(k) for k in range(k_min, k_max + 1)]


def format_table(rows: list[BoundReport], literature: bool = False) -> str:
    """Aligned text table; numbers rounded up to five significant digits."""
    header = ["k", "fk_bound", "M_k", "new_bound", "certified"]
    if literature:
        header.append("single_subcode (literature, not computed)")
    lines = [header]
    for r in rows:
        line = [
            str(r.k),
            round_up(r.fk_bound),
            round_up(r.M_k),
            round_up(r.new_bound),
            "yes" if r.certified else "no",
        ]
        if literature:
            lit = LITERATURE_SINGLE_SUBCODE.get(r.k)
            line.append("-" if lit is None else repr(lit))
        lines.append(line)
    widths = [max(len(row[c]) for row in lines) for c in range(len(header))]
    out = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in lines]
    notes = [
        f"note: k={r.k} formula gives {round_up(r.new_bound)}, "
        f"published value is {STATED_NEW_BOUNDS[r.k]}"
        for r in rows
        if r.stated_mismatch
    ]
    return "\n".join(out + notes)
