#!/usr/bin/env python

import sys

from twounitary.main import main

if __name__ == '__main__':
    sys.exit(main())
