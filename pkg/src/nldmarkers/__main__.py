import sys

from nldmarkers.cli import main

sys.exit(main())
