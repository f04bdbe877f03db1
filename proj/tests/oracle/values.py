"""Reference values frozen into the C++ tests. Pure numpy/mpmath, no zfexp code."""
import itertools, math
import mpmath as mp
import numpy as np

mp.mp.dps = 30

def S(a, t):
    return mp.exp(1j * a * mp.sinh(t))

print("sinh(0.5)", mp.nstr(mp.sinh(0.5), 17))
s = S(1.0, 0.5)
print("S_a=1(0.5)", mp.nstr(s.real, 17), mp.nstr(s.imag, 17))

grid = [-0.5, 0.25, 1.0]
# P_2 entry for row (0,1), column (1,0): S(theta_1 - theta_0) / 2
v = S(1.0, grid[1] - grid[0]) / 2
print("P2[(0,1),(1,0)]", mp.nstr(v.real, 17), mp.nstr(v.imag, 17))

# A = z(h) z+(g) on the sinh_exp space: f00 = sum h g, f11(t, e) = S(t - e) g(t) h(e)
g = [mp.mpc(1, 0.5), mp.mpc(-0.25, 1), mp.mpc(0.75, -0.5)]
h = [mp.mpc(0.5, -1), mp.mpc(2, 0), mp.mpc(-1, 0.25)]
f00 = sum(h[i] * g[i] for i in range(3))
print("f00", mp.nstr(f00.real, 17), mp.nstr(f00.imag, 17))
f11 = S(1.0, grid[0] - grid[2]) * g[0] * h[2]
print("f11(0,2)", mp.nstr(f11.real, 17), mp.nstr(f11.imag, 17))

# contraction counts sum_k C(m,k) C(n,k) k!
print("counts", [sum(math.comb(m, k) * math.comb(n, k) * math.factorial(k) for k in range(min(m, n) + 1))
                 for (m, n) in [(1, 1), (2, 2), (3, 3), (2, 3)]])

# S-factor of C = (2, 2, {(1, 4)}) on rapidities theta = (t1, t2), eta = (e1, e2):
# xi = (t1, t2, e1, e2); pairs (l, r) = (1, 4): product over p = 2..3 of S^(2)_{p,1}.
# S^(m)_{a,b} = S(xi_b - xi_a) when a, b sit on different sides of m, else S(xi_a - xi_b).
def Sm(m, a, b, xi, sa):
    across = (a <= m < b) or (b <= m < a)
    return S(sa, xi[b - 1] - xi[a - 1]) if across else S(sa, xi[a - 1] - xi[b - 1])
xi = [0.3, -0.4, 0.9, -0.4]
val = Sm(2, 2, 1, xi, 1.0) * Sm(2, 3, 1, xi, 1.0)
print("S_C(2,2,{(1,4)})", mp.nstr(val.real, 17), mp.nstr(val.imag, 17))

# fmn bound constant c_mn = sum_k C(m,k) C(n,k) k! sqrt((m-k)!(n-k)!)
def cmn(m, n):
    return sum(math.comb(m, k) * math.comb(n, k) * math.factorial(k) * math.sqrt(math.factorial(m - k) * math.factorial(n - k))
               for k in range(min(m, n) + 1))
print("c_11", repr(cmn(1, 1)), "c_22", repr(cmn(2, 2)), "c_12", repr(cmn(1, 2)))

# Warped: 2 p(t) Q p(e) = a sinh(t - e) with Q = -(a/2mu^2) [[0,1],[1,0]], Minkowski product.
def p(t): return np.array([math.cosh(t), math.sinh(t)])
def mink(x, y): return x[0] * y[0] - x[1] * y[1]
def Q(a, y): return -a / 2 * np.array([y[1], y[0]])
print("2pQp", repr(2 * mink(p(0.7), Q(1.0, p(-0.2)))), "a sinh", repr(math.sinh(0.9)))
