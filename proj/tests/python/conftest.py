import os
import sys

build_dir = os.environ.get("LDPEST_BUILD_DIR")
if build_dir and build_dir not in sys.path:
    sys.path.insert(0, build_dir)
