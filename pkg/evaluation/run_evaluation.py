"""
Acceptance suite runner for the leaf map experiments
"""
import json
import sys
import time
from datetime import datetime
from pathlib import Path
from statistics import mean, median, stdev
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError

# Add parent directory to Python path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from evaluation.metrics import CHECKS
from leafmap.config import DEFAULT_CONFIG_PATH, RunConfig, load_config
from leafmap.errors import LeafMapError


class CheckTrace(BaseModel):
    check: str
    value: Optional[float] = None
    passed: bool
    runtime: float
    error: Optional[str] = None


class RunTrace(BaseModel):
    """One pass over a suite under one configuration"""
    started: str
    suite: str
    config_hash: str
    checks: List[CheckTrace] = []


class TraceLog(BaseModel):
    runs: List[RunTrace] = []

    @classmethod
    def load(cls, path: Path) -> "TraceLog":
        """Trace log at path; an unreadable or foreign file starts a fresh log"""
        try:
            return cls.model_validate_json(path.read_text())
        except (OSError, ValidationError):
            return cls()

    def save(self, path: Path):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2))


def load_suite(path: Path) -> List[Dict[str, Any]]:
    """Check entries of a suite file; the built-in suite when the file is missing"""
    path = Path(path)
    if not path.exists():
        from evaluation.generate_suite import default_suite
        print(f"Suite {path} not found. Using the built-in suite...")
        return default_suite()["checks"]
    with open(path, 'r') as f:
        suite = json.load(f)
    checks = suite.get('checks', [])
    print(f"Loaded {len(checks)} checks from {path}")
    return checks


class Evaluator:
    def __init__(self, suite_path: Path, trace_path: Path):
        self.suite_path = suite_path
        self.trace_path = trace_path
        self.trace = TraceLog.load(trace_path)

    def log_check(self, run: RunTrace, name: str, outcome: Dict[str, Any]):
        """Record one check of the current run; the log is rewritten so partial runs survive"""
        run.checks.append(CheckTrace(check=name, value=outcome.get('value'),
                                     passed=bool(outcome.get('passed')),
                                     runtime=outcome['runtime'], error=outcome.get('error')))
        self.trace.save(self.trace_path)

    def run_evaluation(self, checks: List[Dict[str, Any]], output_path: Path,
                       cfg: RunConfig) -> Dict[str, Any]:
        """Run every check of the suite, then aggregate and save the results"""
        results = {
            'config_hash': cfg.config_hash(),
            'checks': {},
            'runtimes': [],
        }
        run = RunTrace(started=datetime.now().isoformat(), suite=str(self.suite_path),
                       config_hash=results['config_hash'])
        self.trace.runs.append(run)

        for i, entry in enumerate(checks):
            class_name = entry['check']
            print(f"Evaluating check {i+1}/{len(checks)}: {class_name}")
            if class_name not in CHECKS:
                raise LeafMapError(f"unknown check {class_name!r}")
            check = CHECKS[class_name](**entry.get('thresholds', {}))

            start = time.perf_counter()
            try:
                outcome = check.compute(cfg, **entry.get('params', {}))
            except LeafMapError as e:
                print(f"✗ {check.name}: {e}")
                outcome = {'value': None, 'passed': False, 'details': {}, 'error': str(e)}
            outcome['runtime'] = time.perf_counter() - start
            outcome['threshold'] = check.threshold

            status = "✓" if outcome['passed'] else "✗"
            print(f"{status} {check.name}: value={outcome['value']} ({outcome['runtime']:.1f}s)")

            results['checks'][check.name] = outcome
            results['runtimes'].append(outcome['runtime'])
            self.log_check(run, check.name, outcome)

        self._aggregate_results(results)

        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, 'w') as f:
            json.dump(results, f, indent=2, default=float)

        print(f"✓ Evaluation complete! Results saved to {output_path}")
        return results

    def _aggregate_results(self, results: Dict[str, Any]):
        """Pass count and runtime statistics"""
        outcomes = list(results['checks'].values())
        runtimes = results['runtimes']
        passed = sum(1 for outcome in outcomes if outcome['passed'])
        results['summary'] = {
            'passed': passed,
            'failed': len(outcomes) - passed,
            'all_passed': passed == len(outcomes),
            'failed_checks': [name for name, outcome in results['checks'].items()
                              if not outcome['passed']],
        }
        if runtimes:
            results['summary']['runtime'] = {
                'mean': mean(runtimes),
                'median': median(runtimes),
                'std': stdev(runtimes) if len(runtimes) > 1 else 0.0,
                'min': min(runtimes),
                'max': max(runtimes),
                'count': len(runtimes),
            }


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Run the acceptance suite")
    parser.add_argument("--suite", type=str, default="evaluation/datasets/acceptance_suite.json",
                        help="Path to the suite file")
    parser.add_argument("--output", type=str, default="evaluation/results/acceptance.json",
                        help="Output path for results")
    parser.add_argument("--config", type=str, default=str(DEFAULT_CONFIG_PATH))

    args = parser.parse_args()
    cfg = load_config(Path(args.config))

    evaluator = Evaluator(suite_path=Path(args.suite), trace_path=Path(cfg.trace_path))
    results = evaluator.run_evaluation(
        checks=load_suite(Path(args.suite)),
        output_path=Path(args.output),
        cfg=cfg,
    )

    summary = results['summary']
    print(f"{summary['passed']}/{summary['passed'] + summary['failed']} checks passed")
    sys.exit(0 if summary['all_passed'] else 1)
