"""
main.py: ThetaFlow entry point
===============================
Runs the command line in thetaflow/cli.py from the project root:

    python main.py verify
    python main.py convergence configs/advection_k1.cfg
"""

import sys
from pathlib import Path

# Ensure the project root is in Python's module search path
sys.path.insert(0, str(Path(__file__).parent))

from thetaflow.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
