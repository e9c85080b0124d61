import copy
import json

from stiefel.manifold import InvalidArgumentError

DEFAULTS = {
    'shooting': {
        'tol_residual': 1e-13,
        'max_iter': 10,
        'use_reduced': 'auto',
        'tol_mismatch': 1e-8,
    },
    'multiple_shooting': {
        'tol': 1e-12,
        'max_iter': 10,
    },
    'lfms': {
        'ss_max_iter': 10,
        'lf_handover_tol': 1e-3,
        'lf_initial_m': 3,
        'lf_max_m': 16,
        'lf_max_sweeps': 500,
        'ms_tol': 1e-12,
        'ms_max_iter': 10,
        'force_leapfrog': False,
    },
    'karcher': {
        'tol': 1e-8,
        'max_iter': 100,
    },
}


class Settings:
    """
    Dictionary-like application settings: defaults overridden by the
    contents of an optional JSON file.

    Keys are addressed either as top-level section names or as
    ``section/key`` paths.
    """

    def __init__(self, path=None, values=None):
        """Constructor

        :param str|None path: JSON file to read
        :param dict|None values: values overriding both defaults and file
        """
        self._data = copy.deepcopy(DEFAULTS)
        if path is not None:
            try:
                with open(path) as f:
                    loaded = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidArgumentError('Invalid configuration file {}: {}'
                                           .format(path, e))
            self._merge(loaded)
        if values is not None:
            self._merge(values)

    def _merge(self, values):
        if not isinstance(values, dict):
            raise InvalidArgumentError('Configuration must be a JSON object')
        for key, value in values.items():
            if isinstance(value, dict) and isinstance(self._data.get(key),
                                                      dict):
                self._data[key].update(value)
            else:
                self._data[key] = value

    def _split(self, item):
        if '/' in item:
            return item.split('/', 1)
        return item, None

    def __getitem__(self, item):
        """Retrieve item from settings"""
        section, key = self._split(item)
        if key is None:
            return self._data[section]
        return self._data[section][key]

    def __contains__(self, item):
        """Check if given element exists in settings"""
        section, key = self._split(item)
        if key is None:
            return section in self._data
        return isinstance(self._data.get(section), dict) and \
            key in self._data[section]

    def __setitem__(self, key, value):
        """Set value at key to value in settings"""
        section, name = self._split(key)
        if name is None:
            self._data[section] = value
        else:
            self._data.setdefault(section, {})[name] = value

    def __delitem__(self, key):
        """Delete given setting"""
        section, name = self._split(key)
        if name is None:
            del self._data[section]
        else:
            del self._data[section][name]

    def get(self, key, default=None):
        return self[key] if key in self else default

    def get_float(self, key, default=None):
        """Get a setting converted to float

        :raise InvalidArgumentError: if the value is not a number
        """
        value = self.get(key, default)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise InvalidArgumentError('Setting {} is not a number: {!r}'
                                       .format(key, value))

    def get_int(self, key, default=None):
        """Get a setting converted to int

        :raise InvalidArgumentError: if the value is not an integer
        """
        value = self.get(key, default)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise InvalidArgumentError('Setting {} is not an integer: {!r}'
                                       .format(key, value))

    def section(self, name):
        """Return a copy of a whole section as a dictionary"""
        return dict(self._data.get(name, {}))

    def typed_section(self, name, floats=(), ints=()):
        """Return a copy of a section with numeric values converted

        :param str name: key of the section
        :param floats: keys converted with :meth:`get_float`
        :param ints: keys converted with :meth:`get_int`
        :raise InvalidArgumentError: if a value cannot be converted
        :rtype: dict
        """
        values = self.section(name)
        for keys, getter in ((floats, self.get_float), (ints, self.get_int)):
            for key in keys:
                if key in values:
                    values[key] = getter('{}/{}'.format(name, key))
        return values
