import sys

from fwmav.harness.cli import main

sys.exit(main())
