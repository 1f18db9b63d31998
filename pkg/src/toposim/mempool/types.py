"""Transactions, accounts and client policy profiles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

Price = Union[int, Fraction]


@dataclass
class Account:
    id: str
    next_on_chain_nonce: int = 0


@dataclass(frozen=True, slots=True)
class Transaction:
    """An unconfirmed transfer identified by (sender, nonce, gas_price).

    Prices are Gwei, kept as ints or Fractions so that every comparison
    the mempool makes is exact.
    """

    sender: str
    nonce: int
    gas_price: Price
    max_fee: Optional[Price] = None
    submit_time: float = 0.0
    tx_id: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.nonce < 0:
            raise ValueError(f"negative nonce {self.nonce}")
        if self.gas_price <= 0:
            raise ValueError(f"gas price must be positive, got {self.gas_price}")
        if self.max_fee is not None and self.max_fee < self.gas_price:
            raise ValueError("max_fee must be >= gas_price")
        if not self.tx_id:
            tx_id = f"{self.sender}/{self.nonce}@{self.gas_price}"
            if self.max_fee is not None:
                tx_id += f"^{self.max_fee}"
            object.__setattr__(self, "tx_id", tx_id)

    def price(self, eip1559: bool = False) -> Price:
        if eip1559 and self.max_fee is not None:
            return self.max_fee
        return self.gas_price


@dataclass(frozen=True)
class PolicyProfile:
    """Replacement/eviction parameters of one client type.

    ``U=None`` means the per-sender quota is unbounded.
    """

    client_name: str
    R: Fraction
    U: Optional[int]
    P: int
    L: int
    forwards_futures: bool = False
    eip1559_mode: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "R", Fraction(self.R))
        if self.R < 0:
            raise ValueError("R must be non-negative")
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.U is not None and self.U < 1:
            raise ValueError("U must be >= 1 or unbounded")
        if not 0 <= self.P < self.L:
            raise ValueError("P must satisfy 0 <= P < L")

    def with_(self, **changes) -> "PolicyProfile":
        from dataclasses import replace

        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "client": self.client_name,
            "R": str(self.R),
            "U": "unbounded" if self.U is None else self.U,
            "P": self.P,
            "L": self.L,
            "forwards_futures": self.forwards_futures,
            "eip1559": self.eip1559_mode,
        }


GETH = PolicyProfile("geth", Fraction(1, 10), 4096, 0, 5120)
PARITY = PolicyProfile("parity", Fraction(1, 8), 81, 2000, 8192)
NETHERMIND = PolicyProfile("nethermind", Fraction(0), 17, 0, 2048)
BESU = PolicyProfile("besu", Fraction(1, 10), None, 0, 4096)
ALETH = PolicyProfile("aleth", Fraction(0), 1, 0, 2048)

BUILTIN_PROFILES: dict[str, PolicyProfile] = {
    p.client_name: p for p in (GETH, PARITY, NETHERMIND, BESU, ALETH)
}


def builtin_profile(name: str) -> PolicyProfile:
    try:
        return BUILTIN_PROFILES[name.lower()]
    except KeyError:
        raise KeyError(f"unknown client profile {name!r}") from None


def profile_from_mapping(data: dict) -> PolicyProfile:
    """Build a profile from config keys ``client, R, U, P, L, forwards_futures, eip1559``.

    Missing numeric keys fall back to the named built-in client when there is one.
    """
    name = str(data.get("client", "custom"))
    base = BUILTIN_PROFILES.get(name.lower())

    def pick(key, default):
        if key in data:
            return data[key]
        if base is None and default is None:
            raise KeyError(f"profile {name!r} needs key {key!r}")
        return default

    u = pick("U", base.U if base else None)
    if isinstance(u, str) and u.lower() in ("unbounded", "inf", "none"):
        u = None
    return PolicyProfile(
        client_name=name,
        R=Fraction(str(pick("R", base.R if base else None))),
        U=None if u is None else int(u),
        P=int(pick("P", base.P if base else None)),
        L=int(pick("L", base.L if base else None)),
        forwards_futures=_as_bool(data.get("forwards_futures", False)),
        eip1559_mode=_as_bool(data.get("eip1559", False)),
    )


def _as_bool(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)
