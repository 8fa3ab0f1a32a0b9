import sys

from ammpath.cli import main

sys.exit(main())
