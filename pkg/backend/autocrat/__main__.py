import sys

from autocrat.commands import main

sys.exit(main())
