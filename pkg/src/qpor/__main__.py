from qpor.cli import main
import sys

sys.exit(main())
