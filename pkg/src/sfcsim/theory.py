"""Closed-form worst-case buffer bounds for a single-bottleneck congestion event.

All bounds assume an ideal flow-control reaction: a sender halts the moment
the first congestion notification (CN) arrives, and control packets have zero
serialization delay.  Byte values are exact formula results (floats); the
simulator comparisons add explicit slack for the delays the formulas ignore.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TheoryInputs:
    """Link and delay parameters of the bottleneck feedback loop.

    rate_bps          bottleneck drain rate R
    sender_prop_ns    propagation delay sender -> bottleneck switch (T_A,
                      worst case over senders)
    receiver_prop_ns  propagation delay bottleneck switch -> receiver (T_B)
    tor_prop_ns       propagation delay sender -> its own ToR switch (T_ToR)
    mtu_bytes         MTU, fixing the serialization delay T_S of one packet
    trigger_packets   packets queued before the first CN fires (k)
    incast_degree     number of simultaneous line-rate senders (N)
    rtt_multiple      incast inter-arrival time expressed in RTTs (m)
    """

    rate_bps: int
    sender_prop_ns: float
    receiver_prop_ns: float
    tor_prop_ns: float = 0.0
    mtu_bytes: int = 4000
    trigger_packets: int = 1
    incast_degree: int = 1
    rtt_multiple: float = 1.0

    def __post_init__(self):
        if self.rate_bps <= 0:
            raise ValueError("rate_bps must be positive")
        for name in ("sender_prop_ns", "receiver_prop_ns", "tor_prop_ns"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.tor_prop_ns > self.sender_prop_ns:
            raise ValueError("tor_prop_ns cannot exceed sender_prop_ns")

    @property
    def mtu_ser_ns(self) -> float:
        """Serialization delay of one MTU at the bottleneck rate (T_S)."""
        return self.mtu_bytes * 8 * 1e9 / self.rate_bps

    @property
    def rtt_ns(self) -> float:
        """Base round trip through the bottleneck: 2T_A + 2T_B + 2T_S."""
        return 2 * (self.sender_prop_ns + self.receiver_prop_ns + self.mtu_ser_ns)

    @property
    def feedback_delay_ns(self) -> float:
        """Backward-signaling loop delay T_F = 2T_A + T_S."""
        return 2 * self.sender_prop_ns + self.mtu_ser_ns

    def bytes_in(self, duration_ns: float) -> float:
        return self.rate_bps * duration_ns / 8e9


def trigger_packets_for(rate_bps: int, feedback_delay_ns: float, mtu_bytes: int) -> int:
    """Default k: target queue depth T_F*R expressed in MTUs, rounded."""
    return round(rate_bps * feedback_delay_ns / 8e9 / mtu_bytes)


def buffer_bound_ack_loop(inp: TheoryInputs) -> float:
    """Bytes queued before a receiver-echoed CN can halt a line-rate joiner.

    The CN rides the congested forward path and returns via the receiver, so
    it is observed at 2T_A + 2k*T_S + 2T_B after the joiner starts.
    """
    t = 2 * inp.sender_prop_ns + 2 * inp.trigger_packets * inp.mtu_ser_ns \
        + 2 * inp.receiver_prop_ns
    return inp.bytes_in(t)


def buffer_bound_bts(inp: TheoryInputs) -> float:
    """Bytes queued before a pre-queuing backward CN halts the joiner.

    The CN leaves the switch before the triggering packet enqueues, so it is
    observed at 2T_A + k*T_S.
    """
    t = 2 * inp.sender_prop_ns + inp.trigger_packets * inp.mtu_ser_ns
    return inp.bytes_in(t)


def buffer_bound_incast(inp: TheoryInputs) -> float:
    """Peak bytes for N perfectly synchronized line-rate senders with
    backward CN: each emits for one feedback loop, N * R * (2T_A + T_S)."""
    return inp.incast_degree * inp.bytes_in(inp.feedback_delay_ns)


def async_incast_contained(inp: TheoryInputs, pause_ns: float) -> bool:
    """True iff staggered joiners never stack up: m*RTT > T_F + T_P (strict).

    Equivalently the inter-arrival time exceeds the drain time of one
    joiner's worth of queue, buffer_bound_bts / R.
    """
    return inp.rtt_multiple * inp.rtt_ns > inp.feedback_delay_ns + pause_ns


@dataclass(frozen=True)
class CacheBounds:
    cache_fill_ns: float       # when the sender-side ToR learns of congestion
    cache_miss_before_ns: float  # start threshold below which a later sender misses
    cache_hit_bytes: float     # queue contribution of a cache-hit sender


def cache_hit_bounds(inp: TheoryInputs) -> CacheBounds:
    """Effect of caching CNs at the sender-side ToR.

    A cache hit shortens the feedback loop from 2T_A + T_S to 2T_ToR + T_S,
    cutting a late sender's queue contribution to R * (2T_ToR + T_S).
    """
    fill = inp.feedback_delay_ns - inp.tor_prop_ns
    miss_before = fill - (inp.tor_prop_ns + inp.mtu_ser_ns)
    hit_bytes = inp.bytes_in(2 * inp.tor_prop_ns + inp.mtu_ser_ns)
    return CacheBounds(fill, miss_before, hit_bytes)


# Worked example used by the CLI preset: 100G bottleneck, T_A=4us, T_B=1us,
# T_ToR=1us, 4000B MTU, k=26.  The stated 10us RTT is inconsistent with
# 2(T_A+T_B+T_S)=10.64us for these inputs; we keep T_A=4us and flag it.
WORKED_EXAMPLE = TheoryInputs(
    rate_bps=100_000_000_000,
    sender_prop_ns=4_000.0,
    receiver_prop_ns=1_000.0,
    tor_prop_ns=1_000.0,
    mtu_bytes=4000,
    trigger_packets=26,
    incast_degree=40,
    rtt_multiple=2.0,
)

WORKED_EXAMPLE_NOTE = (
    "note: stated base RTT of 10.00us differs from 2(T_A+T_B+T_S)=10.64us "
    "for these inputs; T_A=4us is kept and the mismatch is reported, not resolved"
)


def summary_table(inp: TheoryInputs, pause_ns: float | None = None) -> list[tuple[str, str]]:
    """Human-readable table of every bound for the given inputs."""
    b_ack = buffer_bound_ack_loop(inp)
    b_bts = buffer_bound_bts(inp)
    b_inc = buffer_bound_incast(inp)
    cache = cache_hit_bounds(inp)
    saving = b_ack - b_bts
    if pause_ns is None:
        pause_ns = (b_bts - inp.bytes_in(inp.feedback_delay_ns)) * 8e9 / inp.rate_bps
    rows = [
        ("bottleneck rate", f"{inp.rate_bps / 1e9:.0f} Gbps"),
        ("T_A / T_B / T_ToR", f"{inp.sender_prop_ns / 1e3:.2f} / "
                              f"{inp.receiver_prop_ns / 1e3:.2f} / "
                              f"{inp.tor_prop_ns / 1e3:.2f} us"),
        ("MTU serialization", f"{inp.mtu_ser_ns / 1e3:.2f} us"),
        ("base RTT", f"{inp.rtt_ns / 1e3:.2f} us"),
        ("feedback loop T_F", f"{inp.feedback_delay_ns / 1e3:.2f} us"),
        ("k (packets to CN)", f"{inp.trigger_packets}"),
        ("receiver-echo bound", f"{b_ack / 1e3:.1f} KB"),
        ("backward-CN bound", f"{b_bts / 1e3:.1f} KB"),
        ("saving", f"{saving / 1e3:.1f} KB = {saving * 8e9 / inp.rate_bps / 1e3:.2f} us "
                   f"({100 * saving / b_ack:.1f}%)"),
        ("drain time of backward-CN bound", f"{b_bts * 8e9 / inp.rate_bps / 1e3:.2f} us"),
        (f"incast bound (N={inp.incast_degree})", f"{b_inc / 1e6:.2f} MB"),
        (f"async incast contained (m={inp.rtt_multiple:g})",
         str(async_incast_contained(inp, pause_ns))),
        ("cache fill time", f"{cache.cache_fill_ns / 1e3:.2f} us"),
        ("cache-miss start threshold", f"{cache.cache_miss_before_ns / 1e3:.2f} us"),
        ("cache-hit queue contribution", f"{cache.cache_hit_bytes / 1e3:.1f} KB"),
    ]
    return rows
