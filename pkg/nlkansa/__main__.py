import sys

import nlkansa.cli

sys.exit(nlkansa.cli.main())
