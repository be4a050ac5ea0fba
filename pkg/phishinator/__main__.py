import sys

from phishinator.cli import main

sys.exit(main())
