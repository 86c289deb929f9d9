# Python version check: 3.11-3.13 (configuration is read with tomllib)
import sys


if sys.version_info < (3, 11) or sys.version_info >= (3, 14):
    print(
        "Warning: glance is tested on Python 3.11-3.13, running on {ver}".format(
            ver=".".join(map(str, sys.version_info[:3]))
        )
    )
