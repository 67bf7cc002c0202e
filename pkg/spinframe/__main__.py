import sys

from spinframe.cli.main import main

sys.exit(main())
