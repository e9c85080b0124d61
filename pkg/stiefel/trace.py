"""
Per-iteration records of the LFMS solver, for plotting convergence curves.
"""
import csv

PHASE_SINGLE = 'single'
PHASE_LEAPFROG = 'leapfrog'
PHASE_MULTIPLE = 'multiple'


class TraceRecord:
    __slots__ = ['phase', 'iteration', 'f_norm', 'length', 'm']

    def __init__(self, phase, iteration, f_norm=None, length=None, m=None):
        self.phase = phase
        self.iteration = iteration
        self.f_norm = f_norm
        self.length = length
        self.m = m

    def __repr__(self):
        return 'TraceRecord({})'.format(
            ', '.join(str(getattr(self, attr)) for attr in self.__slots__))


class TraceCollector:
    """
    Collect monitored quantities of an LFMS run.

    Note that the implementation of TraceCollector is not thread-safe.
    """
    COLUMNS = ('phase', 'iteration', 'F_norm', 'length')

    def __init__(self):
        self.data = []

    def add(self, phase, iteration, f_norm=None, length=None, m=None):
        """Append a record

        :param str phase: ``single``, ``leapfrog`` or ``multiple``
        :param int iteration: iteration number within the phase
        :param float|None f_norm: norm of the multiple shooting residual
        :param float|None length: length of the (broken) geodesic
        :param int|None m: number of junctions, if any
        """
        self.data.append(TraceRecord(phase, iteration, f_norm, length, m))

    def get_iter(self, *args, phase=None):
        """Iterate over the given attributes of the records

        Records with any of the attributes missing are skipped.

        :param str|None phase: restrict to records of a single phase
        """
        for record in self.data:
            if phase is not None and record.phase != phase:
                continue
            res = tuple(getattr(record, key) for key in args)
            if any(map(lambda x: x is None, res)):
                continue
            if len(res) == 1:
                yield res[0]
            else:
                yield res

    def phases(self):
        result = []
        for record in self.data:
            if record.phase not in result:
                result.append(record.phase)
        return result

    def __len__(self):
        return len(self.data)

    def write_csv(self, f):
        """Write the trace with columns phase, iteration, F_norm, length

        :param f: open text file
        """
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(self.COLUMNS)
        for record in self.data:
            writer.writerow([
                record.phase, record.iteration,
                '' if record.f_norm is None else '{:.17g}'.format(
                    record.f_norm),
                '' if record.length is None else '{:.17g}'.format(
                    record.length),
            ])
