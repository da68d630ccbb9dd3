"""Reference values computed once with mpmath at 30 digits from the defining
integrals (not from the package's closed forms) and frozen here."""

# 8 pi int_0^L k^2/(k+1) dk and 8 pi int_0^L k/(k+1)^2 dk
VACUUM_INTEGRAL = {0.1: 0.0077956687564712004, 1.0: 4.8543181080696441,
                   2.0: 27.611138361785621, 12.6: 1743.9626679436904}
RESOLVENT_NORM_SQ = {0.1: 0.11061142832850081, 1.0: 4.8543181080696441,
                     2.0: 10.855977542640057, 12.6: 42.313463139743255}

# int_0^2 k/(1+k) dk
RATIONAL_INTEGRAL_0_2 = 0.90138771133189031

LEADING_ALPHA_001 = 0.07712052506289529          # 8 pi 0.01 (1 - ln 2)
LEADING_ALPHA_0072992 = 0.056291813653908529     # 8 pi 0.0072992 (1 - ln 2)
ERROR_COEFF_UNIT = 23.564404294332849            # V1(1) N2(1)
BUDGET_COEFF_UNIT = 8948.4413236543518           # (16 pi)^2 2/0.75 + 224 pi^2
BUDGET_0004 = 0.14317506117846962
FIELD_BOUND_BETA = 0.18345066590305362           # 8 pi / 137
FIELD_BOUND_0005_2 = 0.25132741228718346
KINETIC_BOUND_001_1 = 0.67020643276582257
KINETIC_BOUND_001_2 = 3.3510321638291129
RC_APPROX_EXAMPLE = 0.058068962408096058         # 0.01 0.25 (32 pi/3) ln 2
UPPER_BOUND_UNIT = 23.227584963238423            # (32 pi/3) ln 2
ONE_OVER_64PI = 0.0049735919716217292
ONE_OVER_45PI = 0.0070735530263064594
E0_HYDROGEN = 1.3319835899621717e-5              # (1/137)^2 / 4
E0_HYDROGEN_Z2 = 5.3279343598486867e-5
RC_TERM_UNIT = 3.4574470442916134e-8             # rc branch, Z=1, L=1, a=1/4
RC_TERM_UNIT_Z2 = 1.3829788177166454e-7

# int_0^L p/(D + p + p^2) dp
INNER_INTEGRAL = {
    (0.1, 1.0): 0.53137023850654603826,
    (0.25, 1.0): 0.43194562200144302473,
    (0.3, 2.0): 0.78138707042260283601,
    (2.0, 0.5): 0.051160123642432395853,
    (1e-6, 1e-3): 0.00099259355708421714507,
    (0.2499, 1.0): 0.43199501235686619777,
}
INNER_SMALL_LAMBDA_OVER_E0 = 0.36452516102574234  # I(0.75 e0, e0)/e0, hydrogen e0

# normalized 1s -> 2p dipole weight, (27/64) 2^15 / 3^10
W_2P = 0.23411065386374028
