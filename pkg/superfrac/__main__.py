import sys

from superfrac.cli import main

sys.exit(main())
