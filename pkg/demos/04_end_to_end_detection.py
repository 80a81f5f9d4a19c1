"""End-to-end Sybil detection on a small walking corpus.

Three scenarios of robots walking random waypoint paths, each containing
one Sybil attacker and a "mirror" hard pair (a legitimate robot walking
the attacker's path reflected across the tag axis, the most confusable
honest geometry).  The pipeline below is the whole system:

    corpus -> traces -> signatures -> windowed distance samples
           -> similarity model -> per-scenario verdicts

Training and verdicts run on the same corpus here to keep the script
short; 05_cross_validated_roc.py does the honest held-out version.
"""

from sybilscatter import (
    CorpusSpec,
    build_corpus,
    generate_dataset,
    scenario_verdicts,
    train_mwle,
)

spec = CorpusSpec(n_scenarios=3, horizon_s=12.0, hard_pair_fraction=1.0,
                  hard_pair_style="mirror")
configs, seeds = build_corpus(spec, master_seed=77)
dataset = generate_dataset(configs, seeds, n_tags=spec.n_tags, profile_len=4)
print(f"{len(dataset)} directed distance samples, "
      f"{dataset.positive_fraction():.1%} from Sybil pairs\n")

model = train_mwle(dataset.training_samples())
weights = ", ".join(f"{w:+.2f}" for w in model.weights)
print(f"similarity model: weights [{weights}], bias {model.bias:+.2f}")
print("(negative weights: larger profile distance -> lower similarity)\n")

for key, verdict in scenario_verdicts(model, dataset, sigma=0.5).items():
    sources = dataset.sources[key]
    by_source = {}
    for ident, src in sources.items():
        by_source.setdefault(src, []).append(ident)
    true_fakes = sorted(i for ids in by_source.values() if len(ids) > 1
                        for i in ids)
    flagged = sorted(verdict.fake_identities)
    pairs = ", ".join(f"{i}~{j}" for i, j in sorted(verdict.sybil_pairs)) or "none"
    status = "correct" if flagged == true_fakes else "WRONG"
    print(f"scenario {key}: flagged pairs {pairs}")
    print(f"  fake identities {flagged} vs truth {true_fakes} -> {status}")
