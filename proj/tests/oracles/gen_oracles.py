"""High-precision reference values used to freeze expected numbers in the C++ tests.

Runs independently of the C++ library: brute-force chain enumeration,
high-precision eigen-decomposition of finite sections, direct series.
"""
import itertools
import mpmath as mp

mp.mp.dps = 160


def geometric_a(q, n):
    q = mp.mpf(q)
    return q ** (-2 * (n + 1)) * (1 - q ** (n + 1))


def section(q, k, N):
    a = [geometric_a(q, n) for n in range(N)]
    A = mp.zeros(N, N)
    for n in range(N):
        A[n, n] = a[n] + (k * k * a[n - 1] if n > 0 else 0)
        if n + 1 < N:
            A[n, n + 1] = A[n + 1, n] = k * a[n]
    return A


def main():
    q = mp.mpf(1) / 4
    k = mp.sqrt(q)
    print("trace 4/45       =", mp.nstr(mp.mpf(4) / 45, 20))
    tr = mp.nsum(lambda j: (1 - k ** (2 * j + 2)) / ((1 - k * k) * geometric_a(q, int(j))), [0, mp.inf])
    print("trace series     =", mp.nstr(tr, 20))

    # c_2 by brute force over j1<j2<=40
    c2 = mp.mpf(0)
    for j1 in range(40):
        for j2 in range(j1 + 1, 41):
            c2 += (1 - k ** (2 * (j1 + 1))) * (1 - k ** (2 * (j2 - j1))) / (
                (1 - k * k) ** 2 * geometric_a(q, j1) * geometric_a(q, j2))
    print("c2 brute         =", mp.nstr(c2, 20), " 16/42525 =", mp.nstr(mp.mpf(16) / 42525, 20))

    W0 = mp.nsum(lambda j: k ** (2 * j) / geometric_a(q, int(j)), [0, mp.inf])
    print("W(0)             =", mp.nstr(W0, 20))
    W1 = mp.nsum(lambda j: k ** (2 * j) / geometric_a(q, int(j)), [1, mp.inf])
    print("w_1(0)=-W1/k     =", mp.nstr(-W1 / k, 20))

    E, Q = mp.eigsy(section(q, k, 60))
    order = sorted(range(60), key=lambda i: E[i])
    print("eigenvalues (N=60) and Gauss weights:")
    for idx in order[:12]:
        print("  ", mp.nstr(E[idx], 25), mp.nstr(Q[0, idx] ** 2, 25))

    A2 = section(q, k, 2)
    E2, _ = mp.eigsy(A2)
    print("N=2 eigenvalues  =", [mp.nstr(e, 20) for e in sorted(E2)])

    # Weyl function at z = gamma/2 = 1.5 by resolvent of big section
    N = 60
    A = section(q, k, N)
    z = mp.mpf(3) / 2
    R = mp.inverse(A - z * mp.eye(N))
    print("w(1.5)           =", mp.nstr(R[0, 0], 20))
    R = mp.inverse(A)
    print("tr J^-1 (N=60)   =", mp.nstr(sum(R[i, i] for i in range(N)), 20))
    A1 = A[1:, 1:]
    R1 = mp.inverse(A1)
    print("tr J1^-1 (N=60)  =", mp.nstr(sum(R1[i, i] for i in range(N - 1)), 20))
    E1, _ = mp.eigsy(A1)
    print("assoc eigs       =", [mp.nstr(e, 20) for e in sorted(E1)[:5]])

    # PowerLaw c=1 p=2 sample numbers
    print("powerlaw tail n0=10 exact =", mp.nstr(mp.nsum(lambda j: 1 / (j + 1) ** 2, [10, mp.inf]), 15))
    # Geometric q=1/4 partial sum first 10 reciprocals
    print("geom sum 1/a_j j<10 =", mp.nstr(sum(1 / geometric_a(q, j) for j in range(10)), 15))


if __name__ == "__main__":
    main()
