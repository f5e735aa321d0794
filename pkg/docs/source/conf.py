# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html
import sys
import os

sys.path.append(os.path.abspath('../..'))

# -- Project information -----------------------------------------------------

project = 'tailfit'
copyright = '2024, piavik'
author = 'piavik'
release = '0.1.0'

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.mathjax',
]

napoleon_google_docstring = True
autodoc_member_order = 'bysource'

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store', ]


# -- Options for HTML output -------------------------------------------------

html_theme = 'nature'
html_static_path = ['_static']
