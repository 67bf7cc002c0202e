"""
Expression language for surface parametrizations.
"""

from spinframe.exprparse.ast import Expr, depth, to_source
from spinframe.exprparse.evaluator import eval_jet2, eval_values
from spinframe.exprparse.jets import Jet2
from spinframe.exprparse.parser import parse

__all__ = ["Expr", "Jet2", "depth", "eval_jet2", "eval_values", "parse", "to_source"]
