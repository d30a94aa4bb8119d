# Main package exports
from .domain import *
from .application import *
from .infrastructure import *
from .interface import *