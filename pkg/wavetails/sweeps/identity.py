import logging
from typing import Iterable, Optional

from wavetails.services.duhamel import verify_master_identity
from wavetails.sweeps.random import IdentitySampler

logger = logging.getLogger(__name__)

IDENTITY_COLUMNS = (
    "l",
    "n",
    "t",
    "r",
    "eta",
    "lhs",
    "rhs_closed",
    "rhs_series",
    "rel_err",
    "rel_err_series",
    "rel_err_expansion",
)


def parse_range(text: str) -> list[int]:
    """
    Parses an inclusive integer range "a:b" (or a single "a"). An empty
    string or a range with b < a gives an empty list.
    """
    text = text.strip()
    if not text:
        return []

    lower, _, upper = text.partition(":")
    lower = int(lower)
    upper = int(upper) if upper else lower

    return list(range(lower, upper + 1))


def run_identity_sweep(
    l_values: Iterable[int],
    n_offsets: Iterable[int],
    samples: int = 20,
    seed: Optional[int] = 0,
) -> list[dict]:
    """
    Checks the light cone identity on random (t, r, eta) for every l and
    every n = l + offset.

    Args:
        l_values (Iterable[int]): Dimension indices.
        n_offsets (Iterable[int]): Offsets n - l, each at least 2.
        samples (int): Points per (l, n).
        seed (int | None): Seed of the sampler.

    Returns:
        list[dict]: One row per check, keyed by IDENTITY_COLUMNS.
    """
    sampler = IdentitySampler(seed)
    rows = []

    for l in l_values:
        for offset in n_offsets:
            n = l + offset
            for point in sampler.samples(samples):
                check = verify_master_identity(
                    l, n, point.t, point.r, point.eta
                )
                rows.append(
                    {
                        "l": l,
                        "n": n,
                        "t": point.t,
                        "r": point.r,
                        "eta": point.eta,
                        "lhs": check.lhs,
                        "rhs_closed": check.rhs_closed,
                        "rhs_series": check.rhs_series,
                        "rel_err": check.rel_err,
                        "rel_err_series": check.rel_err_series,
                        "rel_err_expansion": check.rel_err_expansion,
                    }
                )

    logger.info("Identity sweep: %d checks", len(rows))
    return rows


def get_identity_summary(rows: list[dict], threshold: float) -> dict:
    max_rel_err = max((row["rel_err"] for row in rows), default=0.0)
    max_series = max((row["rel_err_series"] for row in rows), default=0.0)
    return {
        "checks": len(rows),
        "max_rel_err": max_rel_err,
        "max_rel_err_series": max_series,
        "threshold": threshold,
        "passed": max(max_rel_err, max_series) <= threshold,
    }
