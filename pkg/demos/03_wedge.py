# coding: utf-8

# # Heat on a wedge, sort of
#
# On the wedge 0 <= theta <= beta, the function
# u(r, theta) = integral of K(r, tau) sinh(theta tau)/sinh(beta tau) g(tau) d tau
# solves a fourth-order polar PDE, vanishes on theta = 0 and equals (G g)(r)
# on theta = beta.

# In[1]:

import math

import numpy as np

from kelvin_index import bvp, transforms

beta = math.pi / 2
g = transforms.reference_boundary_datum()
field = bvp.WedgeField(g, beta)


# A small table of u: rows are radii, columns are angles.

# In[2]:

radii = [0.5, 1.0, 2.0, 4.0]
angles = np.linspace(0, beta, 5)
print(np.array2string(field.values(radii, angles), precision=5))


# The PDE residual from fourth-order finite differences, and how it scales with
# the step.

# In[3]:

w = bvp.WedgeParams(beta, 1.0, beta / 2)
report = bvp.pde_residual(g, w, field=field)
print("residual:", report.residual)
for name, size in zip(bvp.TERM_NAMES, report.term_magnitudes):
    print(f"  {name:16s} {size:.3e}")
order, samples = bvp.convergence_order(g, w)
print("observed order:", round(order, 2), samples)


# The opening-angle trace against the G transform, computed separately.

# In[4]:

print(bvp.trace_deviation(g, bvp.WedgeParams(beta), np.geomspace(0.25, 4, 7)))
