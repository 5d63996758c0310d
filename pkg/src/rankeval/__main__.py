import sys

from rankeval.cli import main

sys.exit(main())
