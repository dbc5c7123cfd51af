"""Heterogeneous quorum systems: property checks, sink graph, simulator."""

import json
import os

from . import _hqs
from ._hqs import HqsError, JsonError

__all__ = ["System", "simulate", "probe_names", "HqsError", "JsonError"]


def _ids(s):
    return json.dumps(sorted(s, key=lambda x: (isinstance(x, str), x)))


def _sets(text):
    return [frozenset(s) for s in json.loads(text)]


class System:
    def __init__(self, inner):
        self._s = inner

    @classmethod
    def from_dict(cls, d):
        return cls(_hqs.System.from_json(json.dumps(d)))

    @classmethod
    def load(cls, path):
        return cls(_hqs.System.load(os.fspath(path)))

    def to_dict(self):
        return json.loads(self._s.to_json())

    def well_behaved(self):
        return frozenset(json.loads(self._s.well_behaved()))

    # reports are dicts with "property", "holds" and "witness"
    def consistency(self, at=None):
        return json.loads(self._s.consistency(_ids(self.well_behaved() if at is None else at)))

    def availability(self, for_, at=None):
        return json.loads(self._s.availability(_ids(for_), _ids(self.well_behaved() if at is None else at)))

    def inclusion(self, P):
        return json.loads(self._s.inclusion(_ids(P)))

    def sharing(self):
        return json.loads(self._s.sharing())

    def outlived(self, O):
        return json.loads(self._s.outlived(_ids(O)))

    def minimal_quorums(self):
        return _sets(self._s.minimal_quorums())

    def maximal_outlived(self):
        return _sets(self._s.maximal_outlived())

    def sinks(self):
        return _sets(self._s.sinks())

    def dot(self):
        return self._s.dot()


def simulate(scenario, base_dir=".", seed=None):
    """Run a scenario (dict or path) and return the verdict with its trace."""
    if not isinstance(scenario, dict):
        path = os.fspath(scenario)
        with open(path) as fh:
            scenario = json.load(fh)
        base_dir = os.path.dirname(os.path.abspath(path))
    return json.loads(_hqs.simulate(json.dumps(scenario), os.fspath(base_dir), seed))


def probe_names():
    return list(_hqs.probe_names())
