#!/usr/bin/env python3

if __name__ == '__main__':
    import sys
    from stiefel.cli import main
    sys.exit(main())
