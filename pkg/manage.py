#!/usr/bin/env python
import sys

if __name__ == '__main__':
    try:
        from bswitch.cli import run
    except ImportError as exc:
        raise ImportError(
            "Couldn't import bswitch. Are the requirements installed and "
            "is this directory on your PYTHONPATH?"
        ) from exc
    sys.exit(run(sys.argv[1:]))
