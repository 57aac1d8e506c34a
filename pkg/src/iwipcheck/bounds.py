"""Volume bound for periodic proper free factors.

For ambient rank n >= 2 set cplx = 3n - 3 and let Q be the order of
GL(n, Z/3).  If lam bounds the basis-image lengths of a generating set
and its inverses, then every periodic proper free factor of a word of
length k in those generators has a core graph of volume at most

    C^k   with   C = 12 cplx^5 lam^(7 Q cplx).

C overflows any float for interesting ranks, so the report carries
log10(C) on a decimal channel plus the exact integer whenever the bit
size stays moderate.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass

from .errors import EmptyGenSet, RankTooSmall

# exact C is included while 7 Q cplx log2(lam) stays at or under this
EXACT_BITS_LIMIT = 10**6

_LOG_PRECISION = 60


def complexity(rank: int) -> int:
    if rank < 2:
        raise RankTooSmall("complexity needs rank >= 2")
    return 3 * rank - 3


def power_q(rank: int) -> int:
    """Order of GL(rank, Z/3): the power guaranteeing every periodic
    free factor is periodic with this period on abelianizations."""
    if rank < 1:
        raise RankTooSmall("rank must be positive")
    n = 3**rank
    out = 1
    for j in range(rank):
        out *= n - 3**j
    return out


def lambda_of_aut(phi) -> int:
    """Max basis-image length over the map and its inverse; 1 for the
    identity."""
    fwd = max(len(w) for w in phi.images)
    bwd = max(len(w) for w in phi.inverse_images)
    return max(fwd, bwd, 1)


def lambda_of_genset(gens) -> int:
    gens = list(gens)
    if not gens:
        raise EmptyGenSet("empty generating set")
    return max(lambda_of_aut(g) for g in gens)


@dataclass(frozen=True)
class BoundReport:
    rank: int
    cplx: int
    q: int
    lam: int
    phi_length: int
    c_log10: decimal.Decimal
    v_log10: decimal.Decimal
    exact_c: int | None
    enumeration_attainable: bool

    def to_json_dict(self) -> dict:
        return {
            "rank": self.rank,
            "cplx": self.cplx,
            "Q": self.q,
            "lambda": self.lam,
            "phi_length": self.phi_length,
            "C_log10": str(self.c_log10),
            "V_log10": str(self.v_log10),
            "exact_C": self.exact_c,
            "enumeration_attainable": self.enumeration_attainable,
        }

    def format_text(self) -> str:
        lines = [
            f"rank            {self.rank}",
            f"cplx            {self.cplx}",
            f"Q               {self.q}",
            f"lambda          {self.lam}",
            f"|phi|           {self.phi_length}",
            f"log10 C         {self.c_log10}",
            f"log10 V=C^|phi| {self.v_log10}",
            f"exact C         {'omitted (too large)' if self.exact_c is None else self.exact_c}",
            f"attainable      {'yes' if self.enumeration_attainable else 'no'}",
        ]
        return "\n".join(lines) + "\n"


def bound_report(rank: int, gens, phi_length: int,
                 enumeration_cap: int = 10**8) -> BoundReport:
    """Assemble the theoretical volume bound for a word of the given
    length over the generating set."""
    cplx = complexity(rank)
    q = power_q(rank)
    lam = lambda_of_genset(gens)
    with decimal.localcontext() as ctx:
        ctx.prec = _LOG_PRECISION
        base = decimal.Decimal(12 * cplx**5).log10()
        exponent = 7 * q * cplx
        c_log10 = base + exponent * decimal.Decimal(lam).log10()
        v_log10 = phi_length * c_log10
        quantum = decimal.Decimal("1e-6")
        ctx.prec = max(_LOG_PRECISION, v_log10.adjusted() + 10)
        c_log10 = c_log10.quantize(quantum)
        v_log10 = v_log10.quantize(quantum)
    bits = exponent * math.log2(lam) if lam > 1 else 0
    exact_c = 12 * cplx**5 * lam**exponent if bits <= EXACT_BITS_LIMIT else None
    attainable = v_log10 <= decimal.Decimal(enumeration_cap).log10()
    return BoundReport(rank, cplx, q, lam, phi_length,
                       c_log10, v_log10, exact_c, attainable)
