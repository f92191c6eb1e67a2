"""
Key/value run logger.

Diagnostics are accumulated with `logkv` and flushed with `dumpkvs` to every
configured output format (a human-readable table on stdout, a text log, and a
JSON-lines file). Free-form messages go through `log`/`info`/`warn`/...

OFF state corresponds to having Logger.CURRENT == Logger.DEFAULT (stdout only).
"""

from collections import OrderedDict
from contextlib import contextmanager
import json
import os
import os.path as osp
import sys
import time

import numpy as np

LOG_OUTPUT_FORMATS = ['stdout', 'log', 'json']

DEBUG = 10
INFO = 20
WARN = 30
ERROR = 40


class OutputFormat(object):
    def writekvs(self, kvs):
        """Write key-value pairs"""
        raise NotImplementedError

    def writeseq(self, args):
        """Write a sequence of other data (e.g. a logging message)"""
        pass

    def close(self):
        return


def _as_scalar(val):
    if isinstance(val, np.generic):
        return val.item()
    return val


class HumanOutputFormat(OutputFormat):
    def __init__(self, file):
        self.file = file

    def writekvs(self, kvs):
        if not kvs:
            return
        key2str = OrderedDict()
        for (key, val) in kvs.items():
            val = _as_scalar(val)
            valstr = '%-10.4g' % (val,) if isinstance(val, float) else str(val)
            key2str[self._truncate(key)] = self._truncate(valstr)

        keywidth = max(map(len, key2str.keys()))
        valwidth = max(map(len, key2str.values()))

        dashes = '-' * (keywidth + valwidth + 7)
        lines = [dashes]
        for (key, val) in key2str.items():
            lines.append('| %s%s | %s%s |' % (
                key, ' ' * (keywidth - len(key)),
                val, ' ' * (valwidth - len(val)),
            ))
        lines.append(dashes)
        self.file.write('\n'.join(lines) + '\n')
        self.file.flush()

    def _truncate(self, s):
        return s[:30] + '...' if len(s) > 33 else s

    def writeseq(self, args):
        self.file.write(' '.join(str(arg) for arg in args))
        self.file.write('\n')
        self.file.flush()


class JSONOutputFormat(OutputFormat):
    def __init__(self, file):
        self.file = file

    def writekvs(self, kvs):
        row = {k: _as_scalar(v) for k, v in kvs.items()}
        self.file.write(json.dumps(row, sort_keys=True) + '\n')
        self.file.flush()

    def close(self):
        self.file.close()


class _FileHumanOutputFormat(HumanOutputFormat):
    def close(self):
        self.file.close()


def make_output_format(format, ev_dir):
    if format == 'stdout':
        return HumanOutputFormat(sys.stdout)
    os.makedirs(ev_dir, exist_ok=True)
    if format == 'log':
        return _FileHumanOutputFormat(open(osp.join(ev_dir, 'log.txt'), 'wt'))
    elif format == 'json':
        return JSONOutputFormat(open(osp.join(ev_dir, 'progress.json'), 'wt'))
    else:
        raise ValueError('Unknown format specified: %s' % (format,))

# ================================================================
# API
# ================================================================


def logkv(key, val):
    """
    Log a value of some diagnostic.
    Call this once for each diagnostic quantity of the current row.
    """
    Logger.CURRENT.logkv(key, val)


def logkvs(kvs):
    for key, val in kvs.items():
        logkv(key, val)


def dumpkvs():
    """Write all of the diagnostics of the current row"""
    Logger.CURRENT.dumpkvs()


def log(*args, level=INFO):
    """
    Write the sequence of args to the console and output files
    (if you've configured an output file).
    """
    Logger.CURRENT.log(*args, level=level)


def debug(*args):
    log(*args, level=DEBUG)


def info(*args):
    log(*args, level=INFO)


def warn(*args):
    log(*args, level=WARN)


def error(*args):
    log(*args, level=ERROR)


def set_level(level):
    """Set logging threshold on current logger."""
    Logger.CURRENT.set_level(level)


def get_level():
    return Logger.CURRENT.level


def get_dir():
    """
    Directory that log files are being written to.
    None if there is no output directory (i.e., no session was started)
    """
    return Logger.CURRENT.get_dir()


def progress_disabled():
    """tqdm bars are shown only at INFO verbosity or below"""
    return Logger.CURRENT.level > INFO

# ================================================================
# Backend
# ================================================================


class Logger(object):
    DEFAULT = None  # stdout-only logger, so messages work without a session
    CURRENT = None  # logger used by the free functions above

    def __init__(self, dir, output_formats):
        self.name2val = OrderedDict()  # values this row
        self.level = INFO
        self.dir = dir
        self.output_formats = output_formats

    def logkv(self, key, val):
        self.name2val[key] = val

    def dumpkvs(self):
        if self.level <= INFO:
            for fmt in self.output_formats:
                fmt.writekvs(self.name2val)
        self.name2val.clear()

    def log(self, *args, level=INFO):
        if self.level <= level:
            for fmt in self.output_formats:
                fmt.writeseq(args)

    def set_level(self, level):
        self.level = level

    def get_dir(self):
        return self.dir

    def close(self):
        for fmt in self.output_formats:
            fmt.close()


Logger.DEFAULT = Logger(output_formats=[HumanOutputFormat(sys.stdout)], dir=None)
Logger.CURRENT = Logger.DEFAULT


class session(object):
    """Context manager that routes the logger into `dir` for one run."""

    def __init__(self, dir=None, format_strs=None):
        if dir is None:
            dir = os.getenv('STEADY_EULER_LOGDIR')
        self.dir = dir
        self.format_strs = format_strs or (LOG_OUTPUT_FORMATS if dir else ['stdout'])
        self._previous = None

    def __enter__(self):
        self._previous = Logger.CURRENT
        output_formats = [make_output_format(f, self.dir) for f in self.format_strs]
        Logger.CURRENT = Logger(dir=self.dir, output_formats=output_formats)
        Logger.CURRENT.set_level(self._previous.level)
        return Logger.CURRENT

    def __exit__(self, *args):
        if Logger.CURRENT is not Logger.DEFAULT:
            Logger.CURRENT.close()
        Logger.CURRENT = self._previous

# ================================================================
# Console helpers
# ================================================================


def fmt_item(x, width):
    x = _as_scalar(x)
    rep = "%.4g" % x if isinstance(x, float) else str(x)
    return " " * (width - len(rep)) + rep


def fmt_row(width, row, header=False):
    out = " | ".join(fmt_item(x, width) for x in row)
    if header:
        out = out + "\n" + "-" * len(out)
    return out


MESSAGE_DEPTH = 0


@contextmanager
def timed(msg):
    global MESSAGE_DEPTH
    info('\t' * MESSAGE_DEPTH + '=: ' + msg)
    tstart = time.time()
    MESSAGE_DEPTH += 1
    try:
        yield
    finally:
        MESSAGE_DEPTH -= 1
    info('\t' * MESSAGE_DEPTH + "done in %.3f seconds" % (time.time() - tstart))
