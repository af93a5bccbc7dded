class NeuroRxError(Exception):
    """Base class for simulator errors."""


class ConfigurationError(NeuroRxError, ValueError):
    pass


class StimulusError(NeuroRxError, ValueError):
    pass


class TrialError(NeuroRxError):
    """A Monte Carlo trial failed; carries the trial coordinates."""

    def __init__(self, message, *, detector=None, snr_db=None, trial_index=None):
        super().__init__(
            f"{message} (detector={detector}, snr_db={snr_db}, trial={trial_index})"
        )
        self.detector = detector
        self.snr_db = snr_db
        self.trial_index = trial_index
