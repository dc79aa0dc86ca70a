"""
Closed-form performance approximations
"""

from .approximations import (
    SPC_ZF, MPU_PROJ_ZF, MPU_OPT_ZF, MMI_LS_ZF, MMI_OPT_ZF, WF_ZF, SPC_CB, PAPC_CB, EST_LS_ZF,
    ApproxParams, GapEstimate, DEFAULT_PARAMS,
    frob_pinv_approx, f_ls, qmax_approx, n2i_estimate, ls_gap_estimate, ls_gap_expanded,
    cb_gap_estimate, cb_rate_loss, ls_rate_estimate, cb_papc_rate_estimate,
    recommend_method, db, from_db,
)

__all__ = [
    'SPC_ZF', 'MPU_PROJ_ZF', 'MPU_OPT_ZF', 'MMI_LS_ZF', 'MMI_OPT_ZF', 'WF_ZF', 'SPC_CB', 'PAPC_CB', 'EST_LS_ZF',
    'ApproxParams', 'GapEstimate', 'DEFAULT_PARAMS',
    'frob_pinv_approx', 'f_ls', 'qmax_approx', 'n2i_estimate', 'ls_gap_estimate', 'ls_gap_expanded',
    'cb_gap_estimate', 'cb_rate_loss', 'ls_rate_estimate', 'cb_papc_rate_estimate',
    'recommend_method', 'db', 'from_db',
]
