from __future__ import annotations

import logging

import lithops

logger = logging.getLogger(__name__)


class LithopsInvokerWrapper:
    """
    Runs maps on the Lithops localhost backend with one worker process per thread. A single
    thread skips the executor and calls the function in-process. Results always come back in
    iterdata order.
    """

    def __init__(self, threads: int = 1, lithops_config: dict = None):
        self.threads = threads
        self.__config = lithops_config
        self.__fexec = None

    def _executor(self) -> lithops.FunctionExecutor:
        if self.__fexec is None:
            config = self.__config or {"backend": "localhost", "storage": "localhost"}
            self.__fexec = lithops.FunctionExecutor(worker_processes=self.threads, **config)
        return self.__fexec

    def map(self, map_function, map_iterdata, extra_args=None, timeout=None):
        if self.threads == 1:
            logger.debug("Running %d calls of %s in-process", len(map_iterdata), map_function.__name__)
            extra = extra_args or {}
            return [map_function(**data, **extra) for data in map_iterdata]

        fexec = self._executor()
        fut = fexec.map(map_function, map_iterdata, extra_args=extra_args, timeout=timeout)
        res = fexec.get_result(fs=fut)
        return res

    def close(self):
        if self.__fexec is not None:
            self.__fexec.clean()
            self.__fexec = None
