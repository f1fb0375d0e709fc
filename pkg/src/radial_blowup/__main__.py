import sys

from radial_blowup.cli import main

sys.exit(main())
