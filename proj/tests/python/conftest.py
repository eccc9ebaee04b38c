import os
import sys

# prefer the module staged in a CMake build tree over an installed one
_build = os.environ.get("QMLAB_BUILD_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "build"))
_staged = os.path.join(_build, "python")
if os.path.isdir(os.path.join(_staged, "qmlab")):
    sys.path.insert(0, _staged)
