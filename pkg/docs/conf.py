# -*- coding: utf-8 -*-
#
# specscan documentation build configuration file.

import sys
import os

try:
    import scipy
except ImportError:
    import unittest.mock as mock
    MOCK_MODULES = ['numpy', 'scipy', 'h5py']
    for mod_name in MOCK_MODULES:
        sys.modules[mod_name] = mock.Mock()

sys.path.insert(0, os.path.abspath('../src'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'specscan'
copyright = u'2024, the specscan developers'
author = u'the specscan developers'

import specscan
version = '.'.join(specscan.__version__.split(".")[0:2])
release = specscan.__version__

language = "en"
exclude_patterns = ['_build']
add_function_parentheses = True
add_module_names = True
pygments_style = 'sphinx'
keep_warnings = True

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'specscandoc'

man_pages = [
    (master_doc, 'specscan', u'specscan Documentation', [author], 1)
]

intersphinx_mapping = {
    "python": ('https://docs.python.org/3/', None),
    "numpy": ('https://numpy.org/doc/stable/', None),
    "scipy": ('https://docs.scipy.org/doc/scipy/', None),
    "h5py": ('http://docs.h5py.org/en/latest/', None),
}
