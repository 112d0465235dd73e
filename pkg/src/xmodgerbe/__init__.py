"""xmodgerbe: finite crossed modules, simplicial classifying spaces, gerbes."""

__version__ = "0.1.0"
