"""Reading the scenario off the coefficient signs.

The published baseline estimates are classified first, then a few
constructed coefficient patterns.
"""

from bribery.identify import PUBLISHED_BASELINE, CoefficientSet, classify_scenario

published = CoefficientSet.from_pairs(PUBLISHED_BASELINE)
print(classify_scenario(published).table())

tiny = 1e-9
patterns = {
    "only the no-secrecy term": {"ns": (0.5, 0.1), "swc_lambda": (0, tiny), "swc_g": (0, tiny)},
    "nothing significant": {"ns": (0, tiny), "swc_lambda": (0, tiny), "swc_g": (0, tiny)},
    "noisy zeros": {"ns": (0, 0.5), "swc_lambda": (0, 0.03), "swc_g": (0, 6.0)},
}
for name, pairs in patterns.items():
    pairs = {**pairs, "neg_sp": (-9.0, 4.0), "neg_sn_1b": (0.0, 1.0)}
    v = classify_scenario(CoefficientSet.from_pairs(pairs))
    note = " (underpowered)" if v.underpowered else ""
    print(f"\n{name}: {v.verdict}{note}; extortionary {v.flags.extortionary_present}")

# The verdict depends on the test level.
for alpha in (0.10, 0.05, 0.01, 0.001):
    print(f"alpha {alpha:<6g} -> {classify_scenario(published, alpha).verdict}")
