import json
import math
import dataclasses
from fractions import Fraction

import numpy as np


class JSONOutputMixin:

    EXCLUDE_FIELDS = ()
    EXECUTABLE_FIELDS = {}

    @staticmethod
    def map_anything(x, fn):
        if hasattr(x, 'to_json_dict'):
            return x.to_json_dict()
        if isinstance(x, np.ndarray):
            return [JSONOutputMixin.map_anything(ele, fn) for ele in x.tolist()]
        if isinstance(x, str):
            return fn(x)
        if isinstance(x, dict):
            return {str(k): JSONOutputMixin.map_anything(v, fn) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [JSONOutputMixin.map_anything(ele, fn) for ele in x]
        return fn(x)

    @staticmethod
    def prepare_for_json(value):
        if isinstance(value, np.bool_):
            return bool(value)
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, np.floating):
            value = float(value)
        if isinstance(value, Fraction):
            return f'{value.numerator}/{value.denominator}'
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value

    def to_json_dict(self):
        res = {
            **dict(self._get_field_items()),
            **self._get_executable_fields()
        }
        data = {k: v for k, v in res.items() if k not in self.EXCLUDE_FIELDS}
        return self.map_anything(data, self.prepare_for_json)

    def to_json(self, indent=None):
        return json.dumps(self.to_json_dict(), indent=indent)

    def _get_field_items(self):
        for field in dataclasses.fields(self):
            yield field.name, getattr(self, field.name)

    def _get_executable_fields(self):
        return {key: value(self) for key, value in type(self).EXECUTABLE_FIELDS.items()}
