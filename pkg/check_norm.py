#!/usr/bin/env python3
"""
Quick norm checker utility for minklab
"""

import sys
from pathlib import Path

# Add minklab to path
sys.path.insert(0, str(Path(__file__).parent))

from minklab.errors import MinklabError
from minklab.norms import check_axioms, is_absolutely_homogeneous, load_spec
from minklab.sampling import SamplePlan

def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("Usage: check_norm.py NORM_SPEC.json")
        return 2

    print("🔍 minklab Norm Checker")
    print("=" * 40)

    try:
        spec = load_spec(argv[0])
    except MinklabError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return 2

    print(f"\n📐 {spec.family} norm, n = {spec.dim}")
    plan = SamplePlan(count=50)
    report = check_axioms(spec, plan)
    symmetric, residual = is_absolutely_homogeneous(spec, plan)

    ok = report.positivity_ok and report.homogeneity_residual < 1e-10 and report.min_metric_eigenvalue > 0
    print(f"   Positivity:            {'✅' if report.positivity_ok else '❌'}")
    print(f"   Homogeneity residual:  {report.homogeneity_residual:.3e}")
    print(f"   Smallest eigenvalue:   {report.min_metric_eigenvalue:.6g}")
    print(f"   Absolutely homogeneous: {'yes' if symmetric else 'no'} ({residual:.3e})")

    print(f"\n{'✅ Minkowski norm axioms hold' if ok else '❌ Minkowski norm axioms violated'} "
          f"on {report.samples_used} samples")
    if not symmetric:
        print("💡 Brickell-type suites will report the absolute homogeneity hypothesis as failed")
    return 0 if ok else 1

if __name__ == "__main__":
    sys.exit(main())
