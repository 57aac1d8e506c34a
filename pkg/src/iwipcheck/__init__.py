"""Decide full irreducibility of free-group outer automorphisms.

The pipeline enumerates conjugacy classes of proper free factors up to
a volume budget as folded core graphs, tests each for periodicity under
the automorphism, and reports either a certified reducibility witness
or irreducibility up to the stated budget.  Supporting modules compute
the theoretical volume bound and tree intersection numbers.
"""

__version__ = "0.1.0"
