"""nlkansa - Trust-region solvers for RBF collocation of nonlinear elliptic boundary value problems."""

import nlkansa.api
import nlkansa.config
import nlkansa.geometry
import nlkansa.operator_newton
import nlkansa.problems
import nlkansa.rbf_kernels
import nlkansa.system
import nlkansa.trust_region
import nlkansa.utils
