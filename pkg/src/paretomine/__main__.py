import sys

from paretomine.cli.main import main

sys.exit(main())
