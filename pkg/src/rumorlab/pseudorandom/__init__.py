from .budget import SeedBudget, bits_for, budget_draw
from .combined import CombinedGen, combined_eval, combined_rectangle_eval
from .inw import InwGen, inw_expand, rectangle_eval, rectangle_member
from .levels import CompleteLevel, KeyedPermutationLevel, TablePermutationLevel, make_level
from .pairwise import (PairwiseGen, all_outputs, independence_defect, mod_reduce, modulo_deviation,
                       pairwise_eval, product_table)

__all__ = [
    "SeedBudget", "bits_for", "budget_draw",
    "CombinedGen", "combined_eval", "combined_rectangle_eval",
    "InwGen", "inw_expand", "rectangle_eval", "rectangle_member",
    "CompleteLevel", "KeyedPermutationLevel", "TablePermutationLevel", "make_level",
    "PairwiseGen", "all_outputs", "independence_defect", "mod_reduce", "modulo_deviation",
    "pairwise_eval", "product_table",
]
