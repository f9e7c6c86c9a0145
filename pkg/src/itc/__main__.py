import sys

from itc.harness import main

sys.exit(main())
