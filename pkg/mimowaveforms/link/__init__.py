from .link_caller import LinkPoint, run_link
from .link_trial import run_link_shard, run_link_trial
