from abc import ABC, abstractmethod


class Operation(ABC):
    """
    The Operation class:
    - Stores evolution data sampled during a run
    - Is advanced once per step of the simulation loop
    - Presents the stored data
    """

    @abstractmethod
    def __init__(self) -> None:
        """
        Initializes the operation, receiving arguments such as the sampling
        position or the grid it reads from.
        """
        pass

    @abstractmethod
    def iterate(self, *args, **kwargs):
        """
        Runs on every step of a simulation loop, recording results in the
        Operation instance (self).
        """
        pass

    @abstractmethod
    def print_results(self, *args, **kwargs):
        """
        Prints some key values and metrics obtained from the operation.
        """
        pass
