import sys

from polya.cli import main

sys.exit(main())
