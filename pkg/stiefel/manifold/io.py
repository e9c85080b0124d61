"""
Reading and writing matrices as CSV files.

Files are row-major, use '.' as the decimal separator and have no header.
"""
import csv
import io
import logging

import numpy as np

from stiefel.manifold import StiefelPoint, TangentVector, \
    InfeasiblePointError

logger = logging.getLogger('IO')


class ParseError(Exception):
    """
    Raised when a data file cannot be parsed

    ``path``, ``row`` and ``column`` (all 1-based) locate the problem when
    known.
    """

    def __init__(self, message, path=None, row=None, column=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.row = row
        self.column = column

    def __str__(self):
        location = []
        if self.path is not None:
            location.append(str(self.path))
        if self.row is not None:
            location.append('row {}'.format(self.row))
        if self.column is not None:
            location.append('column {}'.format(self.column))
        if location:
            return '{}: {}'.format(', '.join(location), self.message)
        return self.message


class ValidationError(ParseError):
    """Raised by fields when a single value is invalid"""

    def __init__(self, message):
        super().__init__(message)


class Field:
    """
    Single cell of a data file

    Subclasses must override ``to_python``, converting the stripped string
    content to a Python value and raising ``ValidationError`` on failure.
    """

    def __init__(self, empty=False):
        """Constructor

        :param bool empty: whether or not the cell can be empty
        """
        self.empty = empty

    def to_python(self, data):
        raise NotImplementedError

    def get_value(self, data):
        """Get converted value of a cell

        :param str data: cell content
        :return: parsed value or None if the cell is empty
        :raise ValidationError: if the cell is empty and ``empty=False``, or
            its content is invalid
        """
        data = data.strip()
        if not data:
            if self.empty:
                return None
            raise ValidationError('Got empty content, but empty=False')
        return self.to_python(data)


class FloatField(Field):
    """Finite floating point value"""

    def to_python(self, data):
        try:
            value = float(data)
        except ValueError:
            raise ValidationError('Invalid float value: {}'.format(data))
        if not np.isfinite(value):
            raise ValidationError('Value is not finite: {}'.format(data))
        return value


def _open(source, mode):
    if isinstance(source, io.IOBase):
        return source, False
    return open(source, mode, newline=''), True


def read_table(source, fields):
    """Read CSV rows, converting each cell with the given field

    :param source: path or open text file
    :param Field|list[Field] fields: field for all columns, or one field per
        column
    :return: list of rows (lists of parsed values)
    :raise ParseError: on malformed content
    """
    path = getattr(source, 'name', source)
    f, close = _open(source, 'r')
    try:
        rows = []
        width = None
        for row_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError('Expected {} columns, got {}'
                                 .format(width, len(row)), path, row_no)
            values = []
            for col_no, cell in enumerate(row, start=1):
                field = fields[col_no - 1] if isinstance(fields, list) \
                    else fields
                try:
                    values.append(field.get_value(cell))
                except ValidationError as e:
                    raise ParseError(e.message, path, row_no, col_no) from e
            rows.append(values)
    finally:
        if close:
            f.close()
    if not rows:
        raise ParseError('File contains no data', path)
    return rows


def read_matrix(source):
    """Read a dense real matrix from CSV

    :param source: path or open text file
    :rtype: numpy.ndarray
    :raise ParseError: on malformed content
    """
    return np.array(read_table(source, FloatField()), dtype=float)


def write_matrix(target, matrix):
    """Write a matrix as CSV with full double precision

    :param target: path or open text file
    :param numpy.ndarray matrix: 2-D array
    """
    f, close = _open(target, 'w')
    try:
        writer = csv.writer(f, lineterminator='\n')
        for row in np.atleast_2d(matrix):
            writer.writerow(['{:.17g}'.format(value) for value in row])
    finally:
        if close:
            f.close()


def load_point(source, tol=None):
    """Read a point of the Stiefel manifold from CSV

    :param source: path or open text file
    :param float|None tol: feasibility tolerance
    :rtype: StiefelPoint
    :raise ParseError: on malformed content
    :raise InfeasiblePointError: if the columns are not orthonormal
    """
    data = read_matrix(source)
    try:
        return StiefelPoint(data, tol=tol)
    except InfeasiblePointError as e:
        path = getattr(source, 'name', source)
        logger.error('Point read from {} is infeasible: {}'.format(path, e))
        raise


def load_tangent(source, base):
    """Read a tangent vector at ``base`` from CSV

    :param source: path or open text file
    :param StiefelPoint base: base point
    :rtype: TangentVector
    """
    return TangentVector(base, read_matrix(source))
