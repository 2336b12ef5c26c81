"""Central tolerance constants.

Algebraic identities are checked relatively; inequality slacks absolutely
(they accumulate two normalized-duality-map evaluations).
"""

# identities such as the roundtrip x -> Jx -> x and <x,Jx> = ||x||^2
IDENTITY_RTOL = 1e-10

# slack for inequalities built from two J evaluations
INEQUALITY_ATOL = 1e-9

# variational-inequality residual of the generalized projection
VI_TOL = 1e-6

# residual ||Jz + rAz - Jx||_q accepted for a resolvent solve
RESOLVENT_TOL = 1e-8

# per-step slack for the theorem-bearing iteration inequalities
STEP_SLACK_TOL = 1e-7

# Euclidean distance accepted for set membership
MEMBERSHIP_TOL = 1e-7
