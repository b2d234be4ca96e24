"""arenakit: decentralized pairwise policy evaluation.

Subpackages:
    ranking  - latent-bucket preference model, EM solver, baselines, metrics
    server   - central arena service (sessions, credits, leaderboard)
    gateway  - policy inference wire protocol, prober, synthetic servers
    client   - command-line evaluator workflow
    sim      - synthetic worlds and experiment harness
    reports  - episode categorization and policy report pipeline
"""

__version__ = "0.1.0"
