import sys

from rrgroupoid.cli import main

sys.exit(main())
