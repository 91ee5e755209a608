"""
Generate the acceptance suite definitions
Writes one JSON file per suite: the full acceptance run and a quick smoke run
"""
import json
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

sys.path.insert(0, str(Path(__file__).parent.parent))

from evaluation.metrics import CHECKS

ACCEPTANCE_CHECKS: List[Dict[str, Any]] = [
    {
        'check': 'FuchsianLeavesCheck',
        'description': 'Lifted Fuchsian leaves are one ellipse: conic residual and pairwise Hausdorff distance',
        'params': {'max_len': 3, 'leaf_count': 8, 'samples': 128},
        'thresholds': {'threshold': 1e-6, 'conic_threshold': 1e-7},
    },
    {
        'check': 'EllipseRatiosCheck',
        'description': 'Both ellipse ratios equal 2 for every Fuchsian word',
        'params': {'max_len': 4},
        'thresholds': {'threshold': 1e-8},
    },
    {
        'check': 'FuchsianWitnessCheck',
        'description': 'Witness polynomial on a generic and a Fuchsian spectrum',
        'params': {'generic': [3.0, 2.0, 0.5, 1 / 3], 'lam': 2.0},
        'thresholds': {'threshold': 1e-12, 'nonvanishing_floor': 1e-6},
    },
    {
        'check': 'AlphaModelCheck',
        'description': 'Exponent fit on synthetic power curves and at the fixed point of a1',
        'params': {'alphas': [1.25, 1.5, 2.0, 2.5, 3.0], 'word': 'a1', 'max_len': 3},
        'thresholds': {'threshold': 1e-3, 'leaf_tolerance': 0.05},
    },
    {
        'check': 'NonFuchsianDivergenceCheck',
        'description': 'Bent rep breaks the constraint with a thick cone and exponent mismatch',
        'params': {'eps': 0.1, 'lengths': [2, 4, 6], 'min_rank': 2},
        'thresholds': {'threshold': 1e-3},
    },
    {
        'check': 'BenzecriCheck',
        'description': 'Half-ellipse iterates converge monotonically to the ellipse',
        'params': {'steps': 20, 'monotone_from': 2},
        'thresholds': {'threshold': 1e-3},
    },
    {
        'check': 'StructuralInvariantsCheck',
        'description': 'Sampled homomorphism, conjugation, power and frame composition identities',
        'params': {'trials': 20, 'max_word_len': 2},
        'thresholds': {'threshold': 1e-7},
    },
    {
        'check': 'HausdorffOracleCheck',
        'description': 'Vectorized Hausdorff distance against brute-force loops',
        'params': {'pairs': 50, 'max_vertices': 200},
        'thresholds': {'threshold': 1e-9},
    },
]

# Same checks at sizes that finish in seconds
SMOKE_PARAMS: Dict[str, Dict[str, Any]] = {
    'FuchsianLeavesCheck': {'max_len': 3, 'leaf_count': 3, 'samples': 32},
    'EllipseRatiosCheck': {'max_len': 2},
    'NonFuchsianDivergenceCheck': {'eps': 0.1, 'lengths': [2], 'min_rank': 2},
    'StructuralInvariantsCheck': {'trials': 5, 'max_word_len': 2},
    'HausdorffOracleCheck': {'pairs': 5, 'max_vertices': 40},
}


def default_suite(name: str = 'acceptance') -> Dict[str, Any]:
    checks = [dict(entry) for entry in ACCEPTANCE_CHECKS]
    if name == 'smoke':
        for entry in checks:
            entry['params'] = SMOKE_PARAMS.get(entry['check'], entry['params'])
    return {
        'metadata': {
            'name': name,
            'description': 'Acceptance checks for the leaf map experiments',
            'checks': len(checks),
        },
        'checks': checks,
    }


def generate_suite(name: str = 'acceptance',
                   output_path: Optional[Path] = None) -> Dict[str, Any]:
    """Write a suite file and return its contents"""
    suite = default_suite(name)
    unknown = [entry['check'] for entry in suite['checks'] if entry['check'] not in CHECKS]
    if unknown:
        raise ValueError(f"suite names unknown checks: {unknown}")
    suite['metadata']['created_at'] = datetime.now().isoformat()

    output_path = output_path or Path(f"evaluation/datasets/{name}_suite.json")
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, 'w') as f:
        json.dump(suite, f, indent=2)

    print(f"✓ Generated {name} suite with {len(suite['checks'])} checks")
    print(f"  Saved to: {output_path}")
    return suite


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Generate acceptance suite files")
    parser.add_argument("--name", choices=["acceptance", "smoke"], default="acceptance")
    parser.add_argument("--output", type=str, default=None)
    args = parser.parse_args()

    generate_suite(args.name, Path(args.output) if args.output else None)
