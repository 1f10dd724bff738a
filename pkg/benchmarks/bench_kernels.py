"""Compare the compiled and numpy kernel backends.

Times raw kernel calls at several batch sizes, then one full upper-bound and
CAF search per backend, and checks that both backends agree.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from relaybounds import bounds, kernels, zoo


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    channel = zoo.from_name("multiplicative:alpha=0.5,delta=0.5").channel
    pt, k = channel.p_t, channel.kernel
    print(f"{'kernel':<14}{'batch':>7}" + "".join(f"{name:>14}" for name in kernels.backends()))
    for batch in (1, 16, 256, 4096):
        px = rng.dirichlet(np.ones(channel.x_size), size=batch)
        q = rng.dirichlet(np.ones(4), size=(batch, channel.t_size))
        cases = {
            "cutset_terms": lambda m: m.cutset_terms(px, pt, k),
            "relay_terms": lambda m: m.relay_terms(px, pt, k, q),
            "aux_terms": lambda m: m.aux_terms(pt, np.eye(2), q),
        }
        for name, call in cases.items():
            outs, cells = [], []
            for mod in kernels.backends().values():
                outs.append(call(mod))
                cells.append(_time(lambda: call(mod), repeat) * 1e6)
            assert all(np.allclose(o, outs[0], atol=1e-12) for o in outs)
            print(f"{name:<14}{batch:>7}" + "".join(f"{c:>12.1f}us" for c in cells))


def search_table():
    channel = zoo.from_name("multiplicative:alpha=0.5,delta=0.5").channel
    print(f"\n{'search (r0=0.2)':<22}{'backend':>8}{'value':>12}{'seconds':>10}")
    for name in kernels.backends():
        with kernels.use_backend(name):
            for label, fn in (("upper bound", bounds.new_upper_bound),
                              ("caf, |V|=2", bounds.caf_rate)):
                t0 = time.perf_counter()
                value = fn(channel, 0.2).value
                print(f"{label:<22}{name:>8}{value:>12.6f}{time.perf_counter() - t0:>10.2f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    print(f"default backend: {kernels.BACKEND}\n")
    kernel_table(args.repeat)
    search_table()


if __name__ == "__main__":
    main()
