# services/__init__.py
# Orchestration layer: convergence harness, reports, identity suite
