from .complexity import ComplexityCount, complexity_count, complexity_table
from .errors import ErrorCounters, accumulate_errors
from .papr import PaprRecord, papr_ccdf, papr_db
from .psd import PsdRecord, oob_ratio, psd_welch
