# sample_workers.py
"""
Worker pool for per-sample computations.

The driver binds two inproc sockets on one zmq.Context: a PUSH socket that
hands out SampleTask messages and a PULL socket that collects SampleRecord
messages. Each worker thread PULLs tasks, runs the compute function and PUSHes
the record back. Records are reordered by index, so results do not depend on
the number of workers or on scheduling.
"""

import itertools
import logging
import threading
from dataclasses import dataclass

import zmq

from graph_errors import NetDistError, rebuild_error
from sample_messages import RECORD_PREFIX, SampleRecord, decode_frame, encode_record, encode_task

logger = logging.getLogger(__name__)

_run_ids = itertools.count()


@dataclass(frozen=True)
class IndexRecord:
    """Null-null (d0) and null-alternative (d1) distances for one sample index"""

    index: int
    d0: tuple
    d1: tuple
    fingerprint: str = ""


def _to_message(record):
    return SampleRecord(
        index=record.index, d0=list(record.d0), d1=list(record.d1), fingerprint=record.fingerprint
    )


def _from_message(message):
    if message.error_kind:
        raise rebuild_error(message.error_kind, message.error_message)
    return IndexRecord(message.index, tuple(message.d0), tuple(message.d1), message.fingerprint)


class SampleWorkerPool:
    """Run compute(index) -> IndexRecord for indices 0..count-1 on `threads` workers"""

    def __init__(self, compute, threads=1, poll_ms=100):
        self.compute = compute
        self.threads = max(1, int(threads))
        self.poll_ms = poll_ms

    def run(self, count):
        if self.threads == 1 or count <= 1:
            return [self.compute(i) for i in range(count)]

        run_id = next(_run_ids)
        task_addr = f"inproc://netdist-tasks-{id(self)}-{run_id}"
        result_addr = f"inproc://netdist-results-{id(self)}-{run_id}"

        context = zmq.Context()
        tasks = context.socket(zmq.PUSH)
        tasks.setsockopt(zmq.LINGER, 0)
        tasks.bind(task_addr)
        results = context.socket(zmq.PULL)
        results.setsockopt(zmq.LINGER, 0)
        results.setsockopt(zmq.RCVHWM, 0)
        results.bind(result_addr)

        stop = threading.Event()
        workers = [
            threading.Thread(
                target=self._worker_loop,
                args=(context, task_addr, result_addr, stop),
                name=f"sample-worker-{w}",
                daemon=True,
            )
            for w in range(self.threads)
        ]
        for worker in workers:
            worker.start()
        logger.debug("started %d sample workers for %d tasks", self.threads, count)

        try:
            for index in range(count):
                tasks.send(encode_task(index))
            records = {}
            while len(records) < count:
                if not results.poll(self.poll_ms):
                    dead = [w.name for w in workers if not w.is_alive()]
                    if dead:
                        raise NetDistError(
                            f"{', '.join(dead)} exited with {count - len(records)} sample(s) outstanding"
                        )
                    continue
                prefix, message = decode_frame(results.recv())
                if prefix != RECORD_PREFIX:
                    logger.warning("driver ignored a %r frame on the result socket", prefix)
                    continue
                record = _from_message(message)
                records[record.index] = record
        finally:
            stop.set()
            for worker in workers:
                worker.join()
            tasks.close()
            results.close()
            context.term()
        return [records[i] for i in range(count)]

    def _worker_loop(self, context, task_addr, result_addr, stop):
        receiver = context.socket(zmq.PULL)
        receiver.setsockopt(zmq.LINGER, 0)
        receiver.setsockopt(zmq.RCVTIMEO, self.poll_ms)
        receiver.connect(task_addr)
        sender = context.socket(zmq.PUSH)
        sender.setsockopt(zmq.LINGER, 0)
        sender.setsockopt(zmq.SNDHWM, 0)
        sender.connect(result_addr)
        try:
            while not stop.is_set():
                try:
                    raw = receiver.recv()
                except zmq.Again:
                    continue
                try:
                    _, task = decode_frame(raw)
                except Exception:
                    logger.exception("sample worker got an undecodable task frame")
                    raise
                try:
                    message = _to_message(self.compute(task.index))
                except NetDistError as e:
                    message = SampleRecord(index=task.index, error_kind=e.kind, error_message=str(e))
                except Exception as e:
                    logger.exception("sample %d failed", task.index)
                    message = SampleRecord(
                        index=task.index, error_kind=type(e).__name__,
                        error_message=f"{type(e).__name__}: {e}",
                    )
                sender.send(encode_record(message))
        finally:
            receiver.close()
            sender.close()
