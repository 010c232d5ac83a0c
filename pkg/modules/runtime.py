# global objects at runtime should be all put here

import logging
from threading import Lock
from datetime import datetime

LOG_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


lock = Lock()


class State:

    interrupted = False
    job = ""
    job_no = 0
    job_count = 0
    job_timestamp = '0'

    def interrupt(self):
        self.interrupted = True

    def begin(self, job: str, job_count: int = 1):
        with lock:
            self.interrupted = False
            self.job = job
            self.job_no = 0
            self.job_count = job_count
            self.job_timestamp = self.get_job_timestamp()

    def nextjob(self):
        with lock:
            self.job_no += 1

    def get_job_timestamp(self):
        return datetime.now().strftime("%Y%m%d%H%M%S")


state = State()


def setup_logging(level: str = 'INFO'):
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        print(f'[setup_logging] unknown log level {level!r}, falling back to INFO')
        numeric = logging.INFO
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)
