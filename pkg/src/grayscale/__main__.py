import sys

from grayscale.cli import main

sys.exit(main())
