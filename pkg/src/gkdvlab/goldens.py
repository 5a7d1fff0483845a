"""Golden scalar constants for the ground state.

Computed once by adaptive high-precision quadrature (mpmath, 40 digits)
on the closed form Q(y) = (3 / cosh^2(2y))^(1/4); see
tools/compute_goldens.py for the generating script.  Tests compare grid
quadratures against these values, keeping the two evaluation routes
independent.
"""

GROUND_STATE_PEAK = 1.3160740129524925      # Q(0) = 3**0.25
INT_Q = 3.450821807669628                   # integral of Q
INT_Q2 = 2.7206990463513268                 # integral of Q^2 ( = sqrt(3)*pi/2 )
INT_Q6 = 4.08104856952699                   # integral of Q^6
NORM_QP2 = 1.3603495231756634               # integral of (Q')^2 ( = INT_Q6/3 )

# derived targets used by the identity suite
PQ_TARGET = INT_Q ** 2 / 16.0               # (P, Q)
FLUX_TARGET = INT_Q ** 2 / 8.0              # ((10 P^2 Q^3)' + Lam P, Q)
RHO1_LIMIT = -2.0 / INT_Q                   # lim_{y->+inf} rho1
RHO2_LIMIT = 8.0 / INT_Q                    # lim_{y->+inf} rho2
PSIB_Q_COEFF = -INT_Q ** 2 / 8.0            # (Psi_b, Q) / b^2 as b -> 0
