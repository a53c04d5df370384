# __init__.py
# Marks this directory as a Python package for the subspace_distance_app Django project.
# No additional functionality is required here.
