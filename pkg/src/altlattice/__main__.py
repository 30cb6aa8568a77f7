import sys

from altlattice.cli import main

sys.exit(main())
