import sys

from .ztool.cli import main

sys.exit(main())
