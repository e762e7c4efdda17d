"""Errors raised by the capacity toolkit.

Commands map them onto exit codes, the API onto HTTP statuses.
"""


class CapacityError(Exception):
    """Base class for all toolkit errors."""


class ConfigParseError(CapacityError):
    """Scenario file is malformed: bad line, unknown key or non-numeric value."""


class ConfigValidationError(CapacityError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnsupportedCountError(CapacityError):
    """Requested AP count has no layout or closed form."""


class GeometryError(CapacityError):
    pass


class ChannelDomainError(CapacityError):
    pass


class InfeasibleCycleError(CapacityError):
    def __init__(self, ell_m, bound_m):
        self.ell_m = ell_m
        self.bound_m = bound_m
        super().__init__(f"infeasible cycle: ℓ ≥ Tν/2 (ℓ = {ell_m:.1f} m, Tν/2 = {bound_m:.1f} m)")


class CapacityDomainError(CapacityError):
    pass


class TargetUnreachableError(CapacityError):
    def __init__(self, target_bps, best_bps, n_max):
        self.target_bps = target_bps
        self.best_bps = best_bps
        self.n_max = n_max
        super().__init__(
            f"user capacity target {target_bps:.4g} bit/s unreachable with up to {n_max} drones "
            f"(best {best_bps:.4g} bit/s)"
        )
