"""
Utility functions for reading and displaying values in human-friendly
format.
"""
import math
import re
from datetime import timedelta

PI_LITERAL = re.compile(r'^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?'
                        r'\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$', re.IGNORECASE)


def parse_pi_literal(text):
    """Parse a number possibly given as a multiple of pi

    Accepts plain numbers ('2.5'), multiples of pi ('0.95pi', 'pi', '3*pi')
    and fractions of pi ('pi/2', '3pi/4').

    :param str text: text to parse
    :rtype: float
    :raise ValueError: if the text is not a valid number
    """
    match = PI_LITERAL.match(text)
    if match is None:
        return float(text)
    factor = float(match.group(1)) if match.group(1) else 1.0
    if match.group(2):
        denominator = int(match.group(2))
        if denominator == 0:
            raise ValueError('Division by zero in {!r}'.format(text))
        factor /= denominator
    return factor * math.pi


def parse_pi_list(text):
    """Parse a comma-separated list of :func:`parse_pi_literal` values"""
    return [parse_pi_literal(x) for x in text.split(',') if x.strip()]


def format_pi_multiple(value, digits=4):
    """Format a value as a multiple of pi, e.g. 2.984513 => '0.95pi'

    :param float value: value to format
    :param int digits: significant digits of the factor
    :rtype: str
    """
    factor = value / math.pi
    if factor == 0:
        return '0'
    return '{:.{}g}pi'.format(factor, digits)


def natural_timedelta(delta):
    """Express timedelta in human-friendly format, e.g. 70.5 => '1min 10.5s'

    Note that for 60 seconds, the function will return '1min 0.0s' and not
    just '1min'. The same behavior is for hours.

    :param timedelta|float delta: timedelta object or number of seconds
    :return: timedelta in human-friendly format
    :rtype: str
    """
    sec = delta
    if isinstance(delta, timedelta):
        sec = delta.total_seconds()
    if sec < 60:
        return '{:.2f}s'.format(sec)
    mins = int(sec // 60)
    hrs = mins // 60
    sec -= 60 * mins
    mins %= 60

    result = '{:.1f}s'.format(sec)
    result = '{}min '.format(mins) + result
    if hrs:
        result = '{}h '.format(hrs) + result

    return result
