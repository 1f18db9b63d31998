from .pool import (
    FUTURE,
    PENDING,
    Admission,
    Mempool,
    Reject,
    StaleTransaction,
    Status,
)
from .profiling import MempoolTarget, ProfilingError, profile_policy
from .types import (
    ALETH,
    BESU,
    BUILTIN_PROFILES,
    GETH,
    NETHERMIND,
    PARITY,
    Account,
    PolicyProfile,
    Transaction,
    builtin_profile,
    profile_from_mapping,
)

__all__ = [
    "ALETH", "BESU", "BUILTIN_PROFILES", "FUTURE", "GETH", "NETHERMIND", "PARITY", "PENDING",
    "Account", "Admission", "Mempool", "MempoolTarget", "PolicyProfile", "ProfilingError",
    "Reject", "StaleTransaction", "Status", "Transaction", "builtin_profile",
    "profile_from_mapping", "profile_policy",
]
