"""Extended-precision oracles used to mint the constants frozen in the tests.

Run once by hand (``python tests/oracles/mint_constants.py``); nothing here
imports the package, so the values are independent of the code under test.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 50

SQRT3 = mp.sqrt(3)
TAUS = {
    "square": mp.mpc(0, 1),
    "equilateral": mp.mpc(mp.mpf(1) / 2, SQRT3 / 2),
    "third": mp.mpc(mp.mpf(1) / 3, mp.mpf(2) / 3),
}


def theta1(z, tau, nmax=50):
    # -i sum_{n=-50}^{50} (-1)^n q^{(n+1/2)^2} e^{(2n+1) pi i z}
    z = mp.mpc(z)
    s = mp.mpc(0)
    for n in range(-nmax, nmax + 1):
        s += (-1) ** n * mp.exp(mp.pi * 1j * tau * (n + mp.mpf(1) / 2) ** 2) * mp.exp((2 * n + 1) * mp.pi * 1j * z)
    return -1j * s


def theta1_prime0(tau, nmax=50):
    s = mp.mpc(0)
    for n in range(-nmax, nmax + 1):
        s += (-1) ** n * mp.exp(mp.pi * 1j * tau * (n + mp.mpf(1) / 2) ** 2) * (2 * n + 1) * mp.pi * 1j
    return -1j * s


def log_deriv_fd(z, tau, h=mp.mpf("1e-6")):
    # central differences of log theta1, Richardson-extrapolated (h, h/2)
    def d(hh):
        return (mp.log(theta1(z + hh, tau)) - mp.log(theta1(z - hh, tau))) / (2 * hh)
    return (4 * d(h / 2) - d(h)) / 3


def green(z, tau):
    b = mp.im(tau)
    return -mp.log(abs(theta1(z, tau))) / (2 * mp.pi) + mp.im(z) ** 2 / (2 * b)


def trefoil_curvature(r, t0):
    t = sp.symbols("t", real=True)
    rho = r * (1 + sp.Rational(3, 10) * sp.cos(3 * t))
    x, y = rho * sp.cos(t), rho * sp.sin(t)
    k = (sp.diff(x, t) * sp.diff(y, t, 2) - sp.diff(y, t) * sp.diff(x, t, 2)) / (sp.diff(x, t) ** 2 + sp.diff(y, t) ** 2) ** sp.Rational(3, 2)
    return sp.N(k.subs(t, t0), 30)


def trefoil_perimeter(r):
    def speed(t):
        rho = r * (1 + mp.mpf("0.3") * mp.cos(3 * t))
        drho = -r * mp.mpf("0.9") * mp.sin(3 * t)
        return mp.sqrt(rho**2 + drho**2)
    return mp.quad(speed, mp.linspace(0, 2 * mp.pi, 7))


def log_kernel_integral(s, f):
    g = lambda t: mp.log(4 * mp.sin((s - t) / 2) ** 2) * f(t)
    return mp.quad(g, [0, s, 2 * mp.pi])


def single_layer_circle(z, center, r, density, tau, s=None):
    # int G(z - xi) density(t) r dt over a circle; s marks a log singularity at t = s
    def f(t):
        xi = center + r * mp.expj(t)
        return green(z - xi, tau) * density(t) * r
    pts = [0, s, 2 * mp.pi] if s is not None else mp.linspace(0, 2 * mp.pi, 9)
    return mp.quad(f, pts)


if __name__ == "__main__":
    print("theta1(0.25, i) =", theta1(mp.mpf("0.25"), TAUS["square"]))
    z = mp.mpc("0.3", "0.3")
    print("theta1'/theta1(0.3+0.3i, i) =", log_deriv_fd(z, TAUS["square"]))
    for name in ("square", "equilateral"):
        print(f"theta1'(0) [{name}] =", theta1_prime0(TAUS[name]))
    tau = TAUS["third"]
    print("G((1+tau)/2), tau=1/3+2i/3 =", green((1 + tau) / 2, tau))
    print("trefoil r=0.1 signed (ccw) curvature at t=0.4 =", trefoil_curvature(sp.Rational(1, 10), sp.Rational(2, 5)))
    print("trefoil r=0.1 perimeter =", trefoil_perimeter(mp.mpf("0.1")))
    print("int log(4 sin^2) * 1 at s=0.7 =", log_kernel_integral(mp.mpf("0.7"), lambda t: 1))
    s = mp.mpf("0.7")
    print("int log(4 sin^2) cos(3t) at s=0.7 =", log_kernel_integral(s, lambda t: mp.cos(3 * t)), " -(2pi/3)cos(3s) =", -2 * mp.pi / 3 * mp.cos(3 * s))

    mp.mp.dps = 25
    c, r = mp.mpc("0.5", "0.5"), mp.mpf("0.2")
    cos2 = lambda t: mp.cos(2 * t)
    for z in (mp.mpc("0.95", "0.5"), mp.mpc("0.1", "0.05")):
        print(f"S[cos 2t] circle r=0.2 at 0.5+0.5i, z={z} =", single_layer_circle(z, c, r, cos2, TAUS["square"]))
    sk = 2 * mp.pi * 3 / 32
    print("S[cos 2t] on boundary at t=2pi*3/32 =", single_layer_circle(c + r * mp.expj(sk), c, r, cos2, TAUS["square"], sk))
    a1 = mp.mpc("0.5", "0.5")
    sin1 = lambda t: mp.sin(t)
    print("S[sin t] equilateral circle r=0.2 at t=2pi*5/32 =", single_layer_circle(a1 + r * mp.expj(2 * mp.pi * 5 / 32), a1, r, sin1, TAUS["equilateral"], 2 * mp.pi * 5 / 32))
