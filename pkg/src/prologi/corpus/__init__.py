"""Bundled demo programs and interaction scripts.

`restaurant.plg` is a four-item menu; `flights.plg` is a one-day flight
table for two airlines.  The script files under `scripts/` replay every
demo interaction deterministically (see the package README for the goals
they pair with).
"""

from __future__ import annotations

from pathlib import Path

_HERE = Path(__file__).parent


def path(name: str) -> Path:
    """Path of a bundled program (or `scripts/<name>` for scripts)."""
    return _HERE / name


def script_path(name: str) -> Path:
    return _HERE / "scripts" / name


RESTAURANT = path("restaurant.plg")
FLIGHTS = path("flights.plg")

# Goal texts the demo scripts pair with.
RESTAURANT_UCHOOSE_GOAL = (
    "uchoose((price(h,W), price(o,Z)), (price(f,W), price(o,Z)), "
    "(price(h,W), price(c,Z)), (price(f,W), price(c,Z)))"
)
RESTAURANT_READ_GOAL = "read(X, read(Y, (price(X,W), price(Y,Z))))"
FLIGHTS_READ_GOAL = "read(X, X(paris,nice,Dt,At))"
FLIGHTS_UCHOOSE_GOAL = "uchoose(panam(paris,nice,Dt,At), delta(paris,nice,Dt,At))"
