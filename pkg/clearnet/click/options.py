import click


class SeedType(click.ParamType):

    name = 'seed'

    def convert(self, value, param, ctx):
        try:
            seed = int(value)
        except (TypeError, ValueError):
            self.fail('Invalid value "{}" seed must be an integer'.format(value), param, ctx)
        if not 0 <= seed < 2 ** 64:
            self.fail('Invalid value "{}" seed must be an unsigned 64-bit integer'.format(value), param, ctx)
        return seed


class PositiveFloatType(click.ParamType):

    name = 'float'

    def convert(self, value, param, ctx):
        try:
            number = float(value)
        except (TypeError, ValueError):
            self.fail('Invalid value "{}" must be a number'.format(value), param, ctx)
        if not number > 0:
            self.fail('Invalid value "{}" must be positive'.format(value), param, ctx)
        return number


class PositiveIntType(click.ParamType):

    name = 'integer'

    def convert(self, value, param, ctx):
        try:
            number = int(value)
        except (TypeError, ValueError):
            self.fail('Invalid value "{}" must be an integer'.format(value), param, ctx)
        if number < 1:
            self.fail('Invalid value "{}" must be at least 1'.format(value), param, ctx)
        return number
