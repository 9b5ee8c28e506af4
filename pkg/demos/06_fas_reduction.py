"""Deciding feedback-arc-set questions with a consensus solver.

The gadget profile's expected majority graph equals the instance graph, so
a large sampled electorate concentrates onto it and the consensus ranking
doubles as an edge-removal certificate.  The answer check runs against the
instance graph itself, which makes NO answers unconditional.
"""

import numpy as np

from votelab import Digraph, FasInstance, ReductionConfig, run_reduction
from votelab.gadgets import build_instance_profile, fas_optimum
from votelab.harness import reduction_trials

triangle = Digraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
print("triangle: minimum removals to acyclicity =", fas_optimum(triangle))

for t in (0, 1):
    inst = FasInstance(triangle, t, "eulerian")
    cfg = ReductionConfig(K=9)
    summary, rows = reduction_trials(inst, cfg, trials=10, master_seed=5)
    print(f"  budget t={t}: {summary['yes_count']}/10 trials say YES"
          f" -> answer {summary['answer']} (electorate n={rows[0]['n']})")

# Tournament route: the consensus rule is the pure majority-graph one.
transitive = Digraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
inst = FasInstance(transitive, 0, "tournament")
summary, _ = reduction_trials(inst, ReductionConfig(K=9), trials=10, master_seed=6)
print(f"transitive tournament, t=0: {summary['yes_count']}/10 YES -> {summary['answer']}")

# A 4-vertex balanced graph needing two removals: t=1 is a NO, t=2 a YES.
two_triangles = Digraph.from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 2), (2, 3), (3, 0)])
print("\ntwo fused triangles: minimum removals =", fas_optimum(two_triangles))
cfg = ReductionConfig(K=10, max_n=2_000_000)
pp = build_instance_profile(FasInstance(two_triangles, 2, "eulerian"), cfg)
for t in (1, 2):
    inst = FasInstance(two_triangles, t, "eulerian")
    answers = [
        run_reduction(inst, cfg, np.random.default_rng([8, s]), prebuilt=pp).answer
        for s in range(5)
    ]
    print(f"  t={t}: answers {answers}")
