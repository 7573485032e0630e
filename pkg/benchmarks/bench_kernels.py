"""Time the batched kernels on each available backend.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Compares the compiled extension, the numpy fallback and (for a smaller
input) the per-register state-vector path that both must agree with.
"""
import argparse
import timeit

from qct import ekert91, kernels, qsdc
from qct.eve import EveModel
from qct.statevec import make_rng
from qct.teleport import MessageQubitSpec, teleport_arrays

EVE = EveModel.intercept_resend(0.5)


def cases(scale: float):
    n_pairs = int(200_000 * scale)
    n_photons = int(200_000 * scale)
    n_qubits = int(200_000 * scale)
    rng = make_rng(0)
    specs = [MessageQubitSpec.haar_random(rng) for _ in range(n_qubits)]

    def teleport(backend):
        return lambda: teleport_arrays(specs, make_rng(1), backend=backend)

    def e91(backend, n=n_pairs, engine="kernel"):
        return lambda: ekert91.run_session(n, EVE, make_rng(2), engine=engine, backend=backend)

    def photons(backend, n=n_photons, engine="kernel"):
        return lambda: qsdc.run_session((1, 0, 1), n, 0.25, EVE, make_rng(3), engine=engine, backend=backend)

    out = []
    for name in kernels.available():
        b = kernels.get(name)
        out.append((f"bell_teleport   n={n_qubits}", name, teleport(b), n_qubits))
        out.append((f"singlet_pairs   n={n_pairs}", name, e91(b), n_pairs))
        out.append((f"photon_trips    n={n_photons}", name, photons(b), n_photons))
    small = max(1000, n_pairs // 100)
    out.append((f"singlet_pairs   n={small}", "statevec", e91(None, small, "statevec"), small))
    out.append((f"photon_trips    n={small}", "statevec", photons(None, small, "statevec"), small))
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--scale", type=float, default=1.0, help="multiply the input sizes")
    args = parser.parse_args(argv)

    print(f"default backend: {kernels.BACKEND}; available: {', '.join(kernels.available())}")
    print(f"{'kernel':<28}{'backend':<10}{'best [ms]':>12}{'ns/item':>10}")
    for label, backend, fn, n in cases(args.scale):
        fn()  # warm-up
        best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        print(f"{label:<28}{backend:<10}{best * 1e3:>12.2f}{best * 1e9 / n:>10.1f}")


if __name__ == "__main__":
    main()
