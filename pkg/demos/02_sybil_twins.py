"""Why Sybil identities betray themselves.

A Sybil attacker announces two identities from one physical transmitter,
so both announcements traverse the same multipath geometry to the tag
ring.  Distinct robots stand in different spots and light the tags up
differently.  This script simulates one scenario with an attacker
("n0" + "n1" from robotA) and two legitimate robots, builds a signature
profile per identity, and prints how close the profile means are.
"""

import numpy as np

from sybilscatter import (
    ChannelParams,
    RobotAgent,
    ScenarioConfig,
    TagLayout,
    Trajectory,
    build_profile,
    cosine_distance,
    signature_from_trace,
    simulate_scenario,
)


def parked(x, y, horizon_s):
    return Trajectory(waypoints=np.array([(0.0, x, y), (horizon_s + 1.0, x, y)]),
                      speed_mps=0.2)


HORIZON_S = 6.0
PROFILE_LEN = 5

agents = (
    RobotAgent("robotA", ("n0", "n1"), parked(1.0, 0.3, HORIZON_S), 3.0),
    RobotAgent("robotB", ("n2",), parked(-0.9, 0.5, HORIZON_S), 3.0),
    RobotAgent("robotC", ("n3",), parked(0.2, -1.1, HORIZON_S), 3.0),
)
config = ScenarioConfig(
    channel=ChannelParams(),
    tag_layout=TagLayout.regular_ring(4),
    receiver_trajectory=parked(0.05, 0.0, HORIZON_S),
    agents=agents,
    horizon_s=HORIZON_S,
)

run = simulate_scenario(config, rng_seed=42)
print(f"simulated {config.n_periods} update periods for "
      f"{len(run.identities)} identities\n")

profiles = {}
for identity, traces in run.traces.items():
    signatures = [signature_from_trace(t) for t in traces]
    profiles[identity] = build_profile(identity, signatures, PROFILE_LEN)

for identity, profile in profiles.items():
    source = run.true_sources[identity]
    vec = np.array2string(profile.mean_vector, precision=4)
    print(f"{identity} (from {source}): mean signature {vec}")

print("\ncosine distance between profile means:")
idents = sorted(profiles)
for i, a in enumerate(idents):
    for b in idents[i + 1:]:
        d = cosine_distance(profiles[a].mean_vector, profiles[b].mean_vector)
        tag = "same transmitter" if run.true_sources[a] == run.true_sources[b] \
            else "different robots"
        print(f"  {a} vs {b}: {d:.6f}   ({tag})")

print("\nThe Sybil pair sits orders of magnitude closer than any honest pair.")
print("Detection on moving robots compares the variation around the profile")
print("mean instead of the mean itself; see 04_end_to_end_detection.py.")
