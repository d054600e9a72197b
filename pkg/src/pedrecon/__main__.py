import sys

from pedrecon.cli import main

sys.exit(main())
