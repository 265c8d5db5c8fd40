import sys

from sentiscore.cli import main

sys.exit(main())
