from __future__ import annotations

import sys

from eigproj.cli import main

sys.exit(main())
