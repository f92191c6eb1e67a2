import json
import os.path as osp
import tempfile

import numpy as np

from steady_euler import logger


def test_session_writes_log_and_progress():
    with tempfile.TemporaryDirectory() as directory:
        with logger.session(directory):
            assert logger.get_dir() == directory
            logger.info("hello", 3)
            logger.debug("hidden")
            logger.logkvs({'residual': np.float64(1.5e-12), 'steps': 4})
            logger.dumpkvs()
            logger.logkv('steps', 5)
            logger.dumpkvs()
        assert logger.get_dir() is None
        with open(osp.join(directory, 'log.txt')) as f:
            text = f.read()
        with open(osp.join(directory, 'progress.json')) as f:
            rows = [json.loads(line) for line in f]
    assert 'hello 3' in text and 'hidden' not in text
    assert '| residual |' in text
    assert rows == [{'residual': 1.5e-12, 'steps': 4}, {'steps': 5}]


def test_levels_and_progress_bars():
    with tempfile.TemporaryDirectory() as directory:
        with logger.session(directory):
            assert not logger.progress_disabled()
            logger.set_level(logger.WARN)
            assert logger.progress_disabled()
            logger.info("quiet")
            logger.warn("loud")
            logger.logkv('dropped', 1.0)
            logger.dumpkvs()
        assert logger.get_level() == logger.INFO
        with open(osp.join(directory, 'log.txt')) as f:
            text = f.read()
        with open(osp.join(directory, 'progress.json')) as f:
            progress = f.read()
    assert 'loud' in text and 'quiet' not in text
    assert progress == ''


def test_console_helpers():
    assert logger.fmt_item(0.5, 6) == '   0.5'
    assert logger.fmt_item('mass', 6) == '  mass'
    row = logger.fmt_row(6, ['order', 2.0], header=True)
    assert row.splitlines()[1] == '-' * len(row.splitlines()[0])
    with tempfile.TemporaryDirectory() as directory:
        with logger.session(directory):
            with logger.timed("work"):
                logger.info("inside")
        with open(osp.join(directory, 'log.txt')) as f:
            lines = f.read().splitlines()
    assert lines[0] == '=: work'
    assert lines[1] == 'inside'
    assert lines[2].startswith('done in')


if __name__ == '__main__':
    test_session_writes_log_and_progress()
    test_levels_and_progress_bars()
    test_console_helpers()
