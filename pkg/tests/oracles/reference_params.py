"""Line-by-line reference evaluation of the default parameter computation.

Uses only the ``math`` module and plain lists so it shares nothing with the
package code. Run it directly to print the constants frozen into
``tests/test_params.py`` and ``tests/test_weights.py``::

    python3 tests/oracles/reference_params.py
"""
import math


def reference(n, lam=None):
    if lam is None:
        lam = 4 + int(math.floor(3 * math.log(n)))
    wp = [math.log((lam + 1) / 2.0) - math.log(i) for i in range(1, lam + 1)]
    pos = [w for w in wp if w > 0]
    neg = [w for w in wp if w < 0]
    mueff = sum(abs(w) for w in pos) ** 2 / sum(w * w for w in pos)
    mueffm = sum(abs(w) for w in neg) ** 2 / sum(w * w for w in neg) if neg else 0.0
    cm = 1.0
    cs = (mueff + 2) / (n + mueff + 5)
    ds = 1 + cs + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1)
    out = {"lam": lam, "mueff": mueff, "mueff_neg": mueffm, "c_m": cm,
           "c_sigma": cs, "d_sigma": ds}
    mprime = mueff + 1 / mueff - 2 + 0.5 * lam / (lam + 5)
    for suffix, dof in (("", n * (n + 1) / 2), ("D", n)):
        c1 = 1 / (2 * (dof / n + 1) * (n + 1) ** 0.75 + mueff / 2)
        cmu = min(mprime * c1, 1 - c1)
        cc = math.sqrt(mueff * c1) / 2
        out["c_1" + suffix] = c1
        out["c_mu" + suffix] = cmu
        out["c_c" + suffix] = cc
    beta_eig = 10 * n
    out["t_eig"] = max(1, int(math.floor(1 / (beta_eig * (out["c_1"] + out["c_mu"])))))
    out["chi_n"] = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))
    return out


def reference_weights(lam, ratio):
    wp = [math.log((lam + 1) / 2.0) - math.log(i) for i in range(1, lam + 1)]
    sp = sum(abs(w) for w in wp if w > 0)
    sn = sum(abs(w) for w in wp if w < 0)
    pos = [w for w in wp if w > 0]
    neg = [w for w in wp if w < 0]
    mueff = sum(pos) ** 2 / sum(w * w for w in pos)
    mueffm = sum(abs(w) for w in neg) ** 2 / sum(w * w for w in neg) if neg else 0.0
    scale = min(1 + ratio, 1 + 2 * mueffm / (mueff + 2))
    final = []
    for w in wp:
        if w >= 0:
            final.append(w / sp)
        else:
            final.append(w / sn * scale)
    return wp, final, mueff, mueffm


if __name__ == "__main__":
    ref = reference(10, 10)
    for key in sorted(ref):
        print("%s = %r" % (key, ref[key]))
    print()
    for lam in (2, 4):
        r = reference(2, lam)
        ratio = r["c_1"] / r["c_mu"]
        raw, final, me, mem = reference_weights(lam, 0.5)
        print("lam=%d ratio=0.5 raw=%r" % (lam, raw))
        print("  final=%r mueff=%r mueff_neg=%r" % (final, me, mem))
