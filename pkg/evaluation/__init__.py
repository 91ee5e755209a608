# Acceptance suite for the leaf map experiments
# Checks live in metrics.py, the runner in run_evaluation.py
