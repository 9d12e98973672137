import sys

from arbcone.cli import main

sys.exit(main())
