from modules.simnet.engine import Engine, Event, SimClock, HOP_LATENCY
from modules.simnet.session import PaymentSession, TIMEOUT_SLACK
from modules.simnet.harness import Simulation, ConservationError, run_workload, mice_threshold, check_conservation
