"""Per-target checks run before a measurement campaign.

Each target gets a local helper node linked only to it.  The helper serves
both as the monitor for future-forwarding and as the known-truth sink for the
recall probe, whose Z is escalated until the probe detects the helper link.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..mempool import PolicyProfile, Transaction
from ..netsim import SimNetwork
from .primitive import measure_one_link, norm_price
from .types import MeasureConfig

FWD_FUTURE = "FWD_FUTURE"
UNRESPONSIVE = "UNRESPONSIVE"
UNSUPPORTED_CLIENT = "UNSUPPORTED_CLIENT"


@dataclass
class PreprocessResult:
    configs: dict[str, MeasureConfig] = field(default_factory=dict)
    exclusions: dict[str, str] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def adjusted(self, base: MeasureConfig) -> dict[str, int]:
        return {n: c.Z for n, c in sorted(self.configs.items()) if c.Z != base.Z}

    def exclusion_text(self) -> str:
        return "".join(f"{n} {r}\n" for n, r in sorted(self.exclusions.items()))


def preprocess_targets(
    net: SimNetwork,
    nodes: Sequence[str],
    cfg: MeasureConfig,
    *,
    z_step: int = 1000,
    z_cap: Optional[int] = None,
    helper_profile: Optional[PolicyProfile] = None,
) -> PreprocessResult:
    if z_step < 1:
        raise ValueError("z_step must be >= 1")
    z_cap = z_cap if z_cap is not None else 4 * cfg.Z
    out = PreprocessResult()
    for n in sorted(nodes):
        node = net.node(n)
        if not _responds(net, n, cfg):
            out.exclusions[n] = UNRESPONSIVE
            continue
        if node.profile.R == 0:
            out.exclusions[n] = UNSUPPORTED_CLIENT
            continue
        prof = helper_profile or node.profile.with_(client_name="helper", L=min(node.profile.L, max(cfg.Z, 1)),
                                                    P=0, forwards_futures=False)
        helper = f"helper:{n}"
        net.add_node(helper, prof, [n])
        try:
            if _forwards_futures(net, n, helper, cfg):
                out.exclusions[n] = FWD_FUTURE
                continue
            z = cfg.Z
            while True:
                probe_cfg = cfg.with_(Z=z, retries=1, confirm_eviction=False)
                if measure_one_link(net, n, helper, probe_cfg, label="preprocess").connected:
                    break
                if z + z_step > z_cap:
                    out.notes[n] = f"recall probe still negative at Z={z}"
                    break
                z += z_step
            out.configs[n] = cfg.with_(Z=z)
        finally:
            net.remove_node(helper)
    return out


def _responds(net: SimNetwork, n: str, cfg: MeasureConfig) -> bool:
    acct = net.fresh_account("probe")
    # priced well above Y so a busy pool still takes it
    tx = Transaction(acct, net.nonces.get(acct, 0), norm_price(100 * cfg.Y), submit_time=net.now)
    net.send(net.observer, n, [tx])
    net.run_for(cfg.step_gap)
    ok = net.node(n).alive and tx.tx_id in net.node(n).pool
    net.retire_accounts([acct])
    return ok


def _forwards_futures(net: SimNetwork, n: str, helper: str, cfg: MeasureConfig) -> bool:
    acct = net.fresh_account("probe")
    tx = Transaction(acct, net.nonces.get(acct, 0) + 1, norm_price(cfg.Y), submit_time=net.now)
    net.send(net.observer, n, [tx])
    net.run_for(cfg.X)
    seen = tx.tx_id in net.node(helper).pool
    net.retire_accounts([acct])
    return seen
