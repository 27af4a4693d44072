import sys

from layerpot_explorer_py.cli.main import main

sys.exit(main())
