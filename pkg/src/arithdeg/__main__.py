import sys

from arithdeg.cli import main

sys.exit(main())
