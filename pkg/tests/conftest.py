import numpy as np
import pytest

from cvlab.sweep import geometric_schedule, run_sweep
from cvlab.zoo import zoo_entry

# deep doubling schedule for the limit-hungry surfaces; the hypothesis
# controls stay shallow so their negative curvature remains above the
# detection slack over the whole probe window
DEEP_SCHEDULE = geometric_schedule(0.0, 10)
SHALLOW_SCHEDULE = list(np.geomspace(0.5, 64.0, 12))

SCHEDULES = {
    "flat-cylinder": DEEP_SCHEDULE,
    "polar-plane": DEEP_SCHEDULE,
    "paraboloid": DEEP_SCHEDULE,
    "capped-cone": DEEP_SCHEDULE,
    "catenoid": SHALLOW_SCHEDULE,
    "cusp-cap": SHALLOW_SCHEDULE,
}


@pytest.fixture(scope="session")
def zoo_reports():
    return {
        name: run_sweep(zoo_entry(name).model, schedule)
        for name, schedule in SCHEDULES.items()
    }
