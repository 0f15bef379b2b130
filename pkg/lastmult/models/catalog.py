"""Built-in models in the model file format."""

from typing import Dict


HOST_PARASITE = """
[model]
name = host_parasite
dim = 2
vars = x, y
params = a=1, b=1, c=1, delta=1
description = Host-parasite population model with a time-dependent last multiplier

[dynamics]
x = a*x - b*x*y
y = c*y - delta*y^2/x

[structure]
multiplier = exp(c*t)/(x*y^2)
psi = a*x
phi = c*y
H = -exp(c*t)*(b*ln(y) + delta/x)

[canonical]
q = a*t - ln(x)
p = exp(c*t)/y
H = (-b*(c*t - ln(p)) - delta*exp(q - a*t))*exp(c*t)

[conformal]
omega = 1/(x*y^2)
theta_x = -1/(x*y)
Z_y = -y
scale = -c
H = -a/y - b*ln(y) - delta/x

[errata]
- psi subtracts from the x equation and phi from the y equation; the prose swaps the two names.
- The published conformal data (Omega = x y^2 dx^dy, theta = x y^3 dx / 3, Z = y d/dy, a = c) cannot satisfy Omega = -d theta and i_Z Omega = -theta together. Used instead: Omega = dx^dy / (x y^2), theta = -dx / (x y), Z = -y d/dy, a = -c.
"""

GOMPERTZ = """
[model]
name = gompertz
dim = 2
vars = x, y
params = a=1, b=1, c=1, delta=1, kappa=1, nu=1
description = Gompertz interaction model

[dynamics]
x = x*(a*ln(x/kappa) + b*y)
y = y*(delta*x + c*ln(y/nu))

[structure]
multiplier = exp(-(a + c)*t)/(x*y)
psi = a*x*ln(x/kappa)
phi = c*y*ln(y/nu)
H = exp(-(a + c)*t)*(b*y - delta*x)

[canonical]
q = exp(-a*t)*ln(x/kappa)
p = exp(-c*t)*ln(y/nu)
H = exp(-(a + c)*t)*(b*nu*exp(p*exp(c*t)) - delta*kappa*exp(q*exp(a*t)))

[errata]
- The tabulated multiplier exp(-(a + c) t) lacks the factor 1/(x y) that the tabulated canonical coordinates require.
- psi and phi are derived from the canonical coordinates; they are not tabulated.
"""

MUTUALISTIC = """
[model]
name = mutualistic
dim = 2
vars = x, y
params = a=1, b=2, c=1, d=1, lam=1, nu=1
description = Mutualistic Lotka-Volterra type model

[derived]
beta = c*(b + d)/(b*c - a*d) - 2
gamma = a*(b + d)/(b*c - a*d) - 1
k = a/(gamma + 1)
kp = b/(gamma + 2)
alpha = -(lam*(beta + 1) + nu*(gamma + 1))

[dynamics]
x = x*(lam - a*x + b*y)
y = y*(nu + c*x - d*y)

[structure]
multiplier = exp(alpha*t)*x^beta*y^gamma
psi = lam*x
phi = nu*y
H = exp(alpha*t)*(-k*x^(beta + 2)*y^(gamma + 1) + kp*y^(gamma + 2)*x^(beta + 1))

[canonical]
q = x^(beta + 1)*exp(-lam*(beta + 1)*t)/(beta + 1)
p = y^(gamma + 1)*exp(-nu*(gamma + 1)*t)/(gamma + 1)
H = -a*p*((beta + 1)*q)^((beta + 2)/(beta + 1))*exp(lam*t) + d*q*((gamma + 1)*p)^((gamma + 2)/(gamma + 1))*exp(nu*t)

[errata]
- The tabulated constants k, k', alpha, beta, gamma are fixed by exactness: a (beta + 2) = c (gamma + 1) and b (beta + 1) = d (gamma + 2). Requires b c != a d.
- The canonical pair is the tabulated q, p; it is consistent with the derived alpha.
"""

KOCH_MEINHARDT = """
[model]
name = koch_meinhardt
dim = 2
vars = x, y
description = Koch-Meinhardt activator-inhibitor model

[dynamics]
x = -x + x^2/y
y = -y + x^2

[structure]
multiplier = 1/x^2
psi = -x
phi = -y
H = ln(y) - x

[canonical]
q = t + ln(sqrt(x*y)) - y/x
p = t + ln(sqrt(x*y))
H = ln(p - q)/2 + p - t - exp(p - t)/sqrt(p - q)

[errata]
- psi and phi are derived from the canonical coordinates; they are not tabulated.
"""

KERMACK_MCKENDRICK = """
[model]
name = kermack_mckendrick
dim = 2
vars = x, y
params = beta=1, gamma=1, nu=1
description = Kermack-McKendrick epidemic model with vital dynamics

[dynamics]
x = -beta*x*y - nu*x
y = beta*x*y - (nu + gamma)*y

[structure]
multiplier = 1/(x*y)
psi = -nu*x
phi = -(nu + gamma)*y
H = -beta*(x + y)

[canonical]
q = ln(x) + nu*t
p = ln(y) + (gamma + nu)*t
H = -beta*(exp(q - nu*t) + exp(p - (gamma + nu)*t))

[errata]
- The tabulated q = ln(y) - nu t makes the transform singular; q = ln(x) + nu t is used.
"""

HARMONIC = """
[model]
name = harmonic
dim = 2
vars = x, y
description = Harmonic oscillator

[dynamics]
x = y
y = -x

[structure]
multiplier = 1
H = (x^2 + y^2)/2

[canonical]
q = x
p = y
H = (q^2 + p^2)/2
"""

LU = """
[model]
name = lu
dim = 3
vars = x, y, z
params = alpha=36, beta=3, gamma=20
description = Lu chaotic system

[dynamics]
x = alpha*(y - x)
y = gamma*y - x*z
z = x*y - beta*z

[structure]
multiplier = exp((alpha + beta - gamma)*t)
psi = -alpha*x
phi = gamma*y
varphi = -beta*z
H1 = x^2/2 - alpha*z
H2 = (y^2 + z^2)*exp((alpha + beta - gamma)*t)/2

[standard]
u = x*exp(alpha*t)
v = y*exp(-gamma*t)
w = z*exp(beta*t)
H1 = u^2*exp(-2*alpha*t)/2 - alpha*w*exp(-beta*t)
H2 = (v^2*exp((alpha + beta + gamma)*t) + w^2*exp((alpha - beta - gamma)*t))/2

[conformal]
a1 = -alpha
a2 = gamma
a3 = -beta
F1 = x^2/2 - alpha*z
F2 = (y^2 + z^2)/2

[errata]
- The exponential factor of the Hamiltonian pair is exp((alpha + beta - gamma) t); the published exponent drops the parentheses. It multiplies H2, so the pair is the pullback of the standard pair.
- The beta one-forms of the time-dependent volume take the bracket coefficients {H1,H2}_(v,w), {H1,H2}_(w,u), {H1,H2}_(u,v); the published display repeats the (u,w) bracket.
"""

QI = """
[model]
name = qi
dim = 3
vars = x, y, z
params = beta=1, gamma=1
description = Qi chaotic system

[dynamics]
x = y - x + y*z
y = gamma*x - x*z - y
z = x*y - beta*z

[structure]
multiplier = exp((beta + 2)*t)
psi = -x
phi = -y
varphi = -beta*z
H1 = (gamma*x^2 - y^2 - (gamma + 1)*z^2)*exp((beta + 2)*t)
H2 = (x^2 + y^2)/(4*(gamma + 1)) - z/2

[standard]
u = x*exp(t)
v = y*exp(t)
w = z*exp(beta*t)
H1 = (gamma*u^2 - v^2)*exp(beta*t) - (gamma + 1)*w^2*exp((2 - beta)*t)
H2 = (u^2 + v^2)*exp(-2*t)/(4*(gamma + 1)) - w*exp(-beta*t)/2

[conformal]
a1 = -1
a2 = -1
a3 = -beta
F1 = gamma*x^2 - y^2 - (gamma + 1)*z^2
F2 = (x^2 + y^2)/(4*(gamma + 1)) - z/2

[errata]
- The divergence of the system is -(2 + beta), so the multiplier is exp((2 + beta) t), which is also the Jacobian of the published standard coordinates.
- The exponential factor exp((beta + 2) t) multiplies H1, so the pair is the pullback of the standard pair.
- The Nambu-Hamiltonian field satisfies i_X dt = 0; i_E dt = 1 holds for the evolution field E = d/dt + X.
"""

CATALOG: Dict[str, str] = {
    "gompertz": GOMPERTZ,
    "harmonic": HARMONIC,
    "host_parasite": HOST_PARASITE,
    "kermack_mckendrick": KERMACK_MCKENDRICK,
    "koch_meinhardt": KOCH_MEINHARDT,
    "lu": LU,
    "mutualistic": MUTUALISTIC,
    "qi": QI,
}


__all__ = ["CATALOG"]
