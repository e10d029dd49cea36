import sys

from vemsolver.harness.cli import main

sys.exit(main())
