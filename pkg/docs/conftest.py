from doctest import ELLIPSIS, NORMALIZE_WHITESPACE

import numpy as np
from sybil import Sybil
from sybil.parsers.codeblock import PythonCodeBlockParser
from sybil.parsers.doctest import DocTestParser
from sybil.parsers.skip import skip


def _numpy_namespace(namespace):
    namespace["np"] = np


pytest_collect_file = Sybil(
    parsers=[
        DocTestParser(optionflags=ELLIPSIS | NORMALIZE_WHITESPACE),
        PythonCodeBlockParser(),
        skip,
    ],
    fixtures=["tmpdir"],
    setup=_numpy_namespace,
    pattern='*.rst',
).pytest()
