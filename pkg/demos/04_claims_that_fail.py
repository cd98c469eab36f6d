# coding: utf-8

# # Two claims that do not survive a numerical check

# In[1]:

import numpy as np

from kelvin_index import specfun, transforms


# ## A bound on K_{i tau}(1/sqrt x)^2
#
# The claimed bound is K_{i tau}(1/sqrt x)^2 <= x^{1/4}/sinh(pi tau). The ratio
# of the two sides should stay below 1. It does not.

# In[2]:

x = np.geomspace(0.01, 100, 9)
for tau in (0.5, 1.0, 2.0):
    print(tau, np.round(transforms.lebedev_ratio(x, tau), 3))


# ## A residue series and a 0F3 combination
#
# The sum of residues of a gamma-ratio integral is supposed to equal a two-term
# 0F3 combination. The ratio would then be 1, or at least constant. It is neither.

# In[3]:

for tau in (0.3, 1.0):
    ratios = [specfun.gamma_ratio_residue_sum(tau, x) / specfun.hypergeometric_pair_combination(tau, x)
              for x in (0.5, 1.0, 4.0)]
    print(tau, np.round(ratios, 3))


# The next identity in the chain, 0F3 combination = Kelvin-function
# combination, does hold:

# In[4]:

print(specfun.hypergeometric_pair_combination(0.7, 2.0), specfun.kelvin_pair_combination(0.7, 2.0))
