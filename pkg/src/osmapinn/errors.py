class SingularityError(ValueError):
    """A formula was evaluated at (or numerically too close to) a singular point."""


class BesselNullError(ValueError):
    """Field coefficients were requested for orders sitting on a Bessel null."""

    def __init__(self, orders, message=None):
        self.orders = list(orders)
        super().__init__(message or f"j_u(kr) is null for orders {self.orders}")


class TrainingDivergedError(RuntimeError):
    """The PINN loss became non-finite during training."""

    def __init__(self, epoch):
        self.epoch = epoch
        super().__init__(f"loss became NaN/Inf at epoch {epoch}")
