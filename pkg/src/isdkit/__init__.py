"""Linear codes over prime fields, generic and algebraic decoders, random-code
statistics, complexity exponents and reductions to syndrome decoding."""
from .gf_linalg import FieldCtx
from .instances import DecodingInstance, NoisyCodewordInstance, gen_dp, verify

__all__ = ["FieldCtx", "DecodingInstance", "NoisyCodewordInstance", "gen_dp", "verify"]
__version__ = "0.1.0"
