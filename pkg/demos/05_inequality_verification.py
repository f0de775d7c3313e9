"""Ensemble verification of the product estimates and multiplier identities.

Each named case evaluates its inequality exactly as written over a
fixed-seed ensemble of band-limited random fields, at two resolutions.
Inequalities report their empirical max ratio (never an absolute constant);
exact identities report residuals.
"""

from compactlab.estimates import EstimateCase, format_table, run_case

cases = [
    EstimateCase("Symm-1", s=0.5, size=32),
    EstimateCase("Asym-3", s=0.5, size=32),
    EstimateCase("Trilinear", s=0.5, size=32),
    EstimateCase("Comm", s=0.5, size=32),
    EstimateCase("Symm-1", s=0.5, tau=0.1, size=32),  # analytic variant
    EstimateCase("EquivalentNorm", s=0.5, size=32),
    EstimateCase("C-inverse", tau=0.5, size=32),
    EstimateCase("ProductRule", size=32),
    EstimateCase("MultiplierAlgebra"),
    EstimateCase("KernelMass", tau=0.5),
]
print(format_table([run_case(c) for c in cases]))
print("\n(`compactlab verify-estimates` runs the full suite from the CLI.)")
