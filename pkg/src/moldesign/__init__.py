"""moldesign: molecular design by sequential graph edits with a masked
graph-transformer policy trained in a sample-and-improve loop."""

from . import alphabet, molgraph

__version__ = "0.1.0"
