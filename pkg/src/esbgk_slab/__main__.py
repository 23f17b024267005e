"""Module execution shim so `python -m esbgk_slab` behaves like the script."""

import sys

from .cli import main

sys.exit(main())
