"""Extended-precision (60 digit) reference values for the fixed pair
A0 = [[2,1],[1,2]], B0 = diag(1,4). Output is frozen into the Rust tests."""
import mpmath as mp

mp.mp.dps = 60

A = mp.matrix([[2, 1], [1, 2]])
B = mp.matrix([[1, 0], [0, 4]])


def fn(M, f):
    E, Q = mp.eighe(M)
    D = mp.diag([f(e) for e in E])
    return Q * D * Q.T


def schatten_sym(M, p):
    E, _ = mp.eighe(M)
    return mp.fsum(abs(e) ** p for e in E) ** (1 / mp.mpf(p))


ah = fn(A, mp.sqrt)
aih = fn(A, lambda x: 1 / mp.sqrt(x))
M = aih * B * aih
M = (M + M.T) / 2
logM = fn(M, mp.log)
diff = fn(A, mp.log) - fn(B, mp.log)

for p in ["1.1", "1.5", "2", "3", "4"]:
    p = mp.mpf(p)
    d = schatten_sym(logM, p)
    le = schatten_sym(diff, p)
    print("p=%s delta=%s logeuclid=%s gap=%s" % (mp.nstr(p, 3), mp.nstr(d, 20), mp.nstr(le, 20), mp.nstr(d - le, 20)))

mean = ah * fn(M, mp.sqrt) * ah
print("mean", [mp.nstr(mean[i, j], 20) for i in range(2) for j in range(2)])
sq = fn(A, mp.sqrt)
print("sqrtA0", [mp.nstr(sq[i, j], 20) for i in range(2) for j in range(2)])
for t in ["0.25", "0.75"]:
    t = mp.mpf(t)
    g = ah * fn(M, lambda x: x ** t) * ah
    print("wmean t=%s" % t, [mp.nstr(g[i, j], 20) for i in range(2) for j in range(2)])
