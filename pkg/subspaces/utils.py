"""
Display helpers shared by the report writer and the admin.

A value is missing when it is None, an empty or 'None' string, or a float NaN;
missing values display as a period.
"""

import math

MISSING = '.'


def is_missing(value) -> bool:
    if value is None or value in ('', 'None'):
        return True
    return isinstance(value, float) and math.isnan(value)


def dot_if_none(value, use_dot=True):
    """The value itself, or MISSING ('' with use_dot=False) when it is missing."""
    if is_missing(value):
        return MISSING if use_dot else ''
    return value


def str_with_dots(func):
    """Wrap a __str__ so a missing result displays as MISSING."""
    def wrapper(*args, **kwargs):
        return dot_if_none(func(*args, **kwargs))
    return wrapper


def format_value(value):
    """
    Render one report value: booleans as true/false, floats with 12
    significant digits, missing values as MISSING.
    """
    if is_missing(value):
        return MISSING
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f'{value:.12g}'
    return str(value)
