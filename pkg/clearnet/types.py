from enum import Enum

from click import Choice


class EnumType(Choice):
    def __init__(self, enum):
        self.__enum = enum
        super().__init__(enum.__members__)

    def convert(self, value, param, ctx):
        return self.__enum[super().convert(value, param, ctx)]


class CrossingDirection(Enum):

    distress = 'distress'
    recovery = 'recovery'

    def __str__(self):
        return self.value


class BindingConstraint(Enum):

    none = 'none'
    zero_crossing = 'zero-crossing'
    sign_preservation = 'sign-preservation'
    schedule_breakpoint = 'schedule-breakpoint'

    def __str__(self):
        return self.value


class SuiteScenario(Enum):

    static = 'static'
    conservation = 'conservation'
    oracle = 'oracle'
    constant_rates = 'constant-rates'
    path_independence = 'path-independence'
    convergence = 'convergence'
    creditors_first = 'creditors-first'
    society_first = 'society-first'
    staggered_bridge = 'staggered-bridge'
    properties = 'properties'

    def __str__(self):
        return self.value
