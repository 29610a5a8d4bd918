"""Goldman twist and bulge flows on Hitchin representations, with numerical checks."""

from . import errors, flows, groups, hyp_plane, lie_core, probes

__all__ = ["errors", "flows", "groups", "hyp_plane", "lie_core", "probes"]
