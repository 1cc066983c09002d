import sys

from afl_lab.cli import main

sys.exit(main())
