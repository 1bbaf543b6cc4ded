import sys

from metarep.cli import main

sys.exit(main())
