# __init__.py
# Marks this directory as a Python package for the subspaces Django app.
# The numerical modules import no Django settings and can be used on their own.
