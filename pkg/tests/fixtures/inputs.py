"""
Literal sample inputs for testing.
"""

# Landmark files
LANDMARKS_ONE = "0 12.5 30.0\n"

LANDMARKS_WITH_COMMENTS = """\
# vertex x y
0 12.5 30.0

7 1 2
"""

LANDMARKS_NOT_NUMERIC = "a b c\n"

LANDMARKS_NEGATIVE_INDEX = "-1 2.0 3.0\n"

LANDMARKS_TOO_FEW_FIELDS = "3 4.0\n"

# Label-map manifests
MANIFEST_DEFAULT = """\
width=4
height=4
"""

MANIFEST_CUSTOM_CODES = """\
width=2
height=2
codes=10:left_eye,20:skin
"""

MANIFEST_UNKNOWN_KEY = """\
width=4
height=4
depth=3
"""

MANIFEST_BAD_CODE = """\
width=4
height=4
codes=10:ear
"""

# Annotation files
ANNOTATION = """\
1: 0 1 2
8: 5 9
"""

ANNOTATION_BAD_CODE = "42: 1 2\n"

ANNOTATION_NO_COLON = "1 2 3\n"

# Run configuration
RUN_CONFIG = """\
seed = 3

[fit]
max_iters = 50
learning_rate = 0.01

[anchors]
stride = 4
functions = ["min", "max"]
"""

RUN_CONFIG_UNKNOWN_KEY = """\
[fit]
max_iterations = 50
"""

RUN_CONFIG_BROKEN = """\
[fit
max_iters = 50
"""
