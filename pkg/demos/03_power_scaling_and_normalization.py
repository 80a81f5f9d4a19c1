"""Per-identity power scaling, and why signatures are normalized.

A smarter attacker transmits each fake identity at a different power
(alpha times the base) so that raw reflected powers no longer match
between its identities.  Scaling every tag path by the same factor cannot
change the *direction* of the signature vector, only its length, so the
unit-normalized signature is invariant.  This script shows both halves:
raw signatures diverge with alpha, normalized ones coincide.
"""

import numpy as np

from sybilscatter import (
    ChannelParams,
    RobotAgent,
    ScenarioConfig,
    TagLayout,
    Trajectory,
    signature_from_trace,
    synthesize_trace,
)


def parked(x, y, horizon_s):
    return Trajectory(waypoints=np.array([(0.0, x, y), (horizon_s + 1.0, x, y)]),
                      speed_mps=0.2)


HORIZON_S = 6.0

for alpha in (0.25, 1.0, 4.0):
    attacker = RobotAgent(
        true_source_id="robotA",
        claimed_identities=("n0", "n1"),
        trajectory=parked(1.0, 0.3, HORIZON_S),
        base_tx_power_w=3.0,
        power_scale_per_identity={"n0": alpha},  # n1 stays at alpha = 1
    )
    config = ScenarioConfig(
        channel=ChannelParams(),
        tag_layout=TagLayout.regular_ring(4),
        receiver_trajectory=parked(0.05, 0.0, HORIZON_S),
        agents=(attacker,),
        horizon_s=HORIZON_S,
        snr_db=None,  # noise-free to isolate the scaling effect
    )
    scaled = signature_from_trace(synthesize_trace(config, attacker, "n0", 0.0, 5))
    plain = signature_from_trace(synthesize_trace(config, attacker, "n1", 0.0, 5))

    raw_ratio = scaled.raw / plain.raw
    norm_gap = np.abs(scaled.normalized - plain.normalized).max()
    print(f"alpha = {alpha}")
    print(f"  raw power ratio n0/n1 per tag: "
          f"{np.array2string(raw_ratio, precision=6)}")
    print(f"  max |normalized difference|:   {norm_gap:.3e}\n")

print("Raw signatures scale with alpha; normalized signatures agree to")
print("float precision, so the detector keeps working against power games.")
print("With noise back on, the residual gap is bounded by the SNR instead.")
