import sys

from fisherboost.cli import main

sys.exit(main())
