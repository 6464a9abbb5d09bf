"""Independent reference implementations used as test oracles.

Everything here is deliberately brute-force and kept separate from the
package code paths it checks.
"""

import numpy as np
import torch


def dct2_reference(x: np.ndarray) -> np.ndarray:
    """Direct O(N^4) orthonormal type-II 2-D DCT from the definition."""
    x = np.asarray(x, dtype=np.float64)
    h, w = x.shape
    out = np.zeros((h, w))
    for k in range(h):
        for l in range(w):
            acc = 0.0
            for m in range(h):
                for n in range(w):
                    acc += (
                        x[m, n]
                        * np.cos(np.pi * (2 * m + 1) * k / (2 * h))
                        * np.cos(np.pi * (2 * n + 1) * l / (2 * w))
                    )
            sk = np.sqrt(1.0 / h) if k == 0 else np.sqrt(2.0 / h)
            sl = np.sqrt(1.0 / w) if l == 0 else np.sqrt(2.0 / w)
            out[k, l] = sk * sl * acc
    return out


def idct2_reference(y: np.ndarray) -> np.ndarray:
    """Direct O(N^4) orthonormal type-III (inverse DCT-II) from the definition."""
    y = np.asarray(y, dtype=np.float64)
    h, w = y.shape
    out = np.zeros((h, w))
    for m in range(h):
        for n in range(w):
            acc = 0.0
            for k in range(h):
                for l in range(w):
                    sk = np.sqrt(1.0 / h) if k == 0 else np.sqrt(2.0 / h)
                    sl = np.sqrt(1.0 / w) if l == 0 else np.sqrt(2.0 / w)
                    acc += (
                        sk
                        * sl
                        * y[k, l]
                        * np.cos(np.pi * (2 * m + 1) * k / (2 * h))
                        * np.cos(np.pi * (2 * n + 1) * l / (2 * w))
                    )
            out[m, n] = acc
    return out


def pairwise_auc_reference(scores, labels) -> float:
    """O(M*N) double loop over (positive, negative) pairs with 0.5 tie credit."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def eer_scan_reference(scores, labels):
    """Exhaustive threshold scan: distinct scores, adjacent midpoints, and one
    value above the maximum, visited in ascending order.  Returns
    ((FAR+FRR)/2, threshold) at the point of minimum |FAR-FRR|, comparing
    gaps exactly via cross-multiplied integer counts (a tie keeps the lowest
    threshold)."""
    distinct = sorted(set(float(s) for s in scores))
    thresholds = list(distinct)
    for a, b in zip(distinct, distinct[1:]):
        thresholds.append((a + b) / 2.0)
    thresholds.append(distinct[-1] + 1.0)

    best = None
    for t in sorted(set(thresholds)):
        fp = sum(1 for s, y in zip(scores, labels) if y == 0 and s >= t)
        tn = sum(1 for s, y in zip(scores, labels) if y == 0 and s < t)
        fn = sum(1 for s, y in zip(scores, labels) if y == 1 and s < t)
        tp = sum(1 for s, y in zip(scores, labels) if y == 1 and s >= t)
        far = fp / (fp + tn)
        frr = fn / (tp + fn)
        # fp/(fp+tn) vs fn/(tp+fn) compared without division: exact in int
        gap = abs(fp * (tp + fn) - fn * (fp + tn))
        if best is None or gap < best[0]:
            best = (gap, (far + frr) / 2.0, t)
    return best[1], best[2]


def central_difference_gradients(loss_fn, params, eps=1e-5):
    """Central finite differences of a scalar loss wrt each parameter entry."""
    grads = []
    with torch.no_grad():
        for p in params:
            g = torch.zeros_like(p)
            flat = p.view(-1)
            gflat = g.view(-1)
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + eps
                up = float(loss_fn())
                flat[i] = orig - eps
                down = float(loss_fn())
                flat[i] = orig
                gflat[i] = (up - down) / (2.0 * eps)
            grads.append(g)
    return grads


def assert_gradients_match(module, loss_fn, rtol=1e-4, atol=1e-6, eps=1e-5):
    """Check autograd gradients of every trainable parameter in ``module``
    against central finite differences.  ``loss_fn`` must recompute the
    forward pass from the module's current parameters and return a scalar.

    Modules are expected to be in float64 before calling this.
    """
    named = [(n, p) for n, p in module.named_parameters() if p.requires_grad]
    params = [p for _, p in named]
    module.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = [
        p.grad.detach().clone() if p.grad is not None else torch.zeros_like(p)
        for p in params
    ]
    numeric = central_difference_gradients(loss_fn, params, eps=eps)
    for (name, _), a, f in zip(named, analytic, numeric):
        err = (a - f).abs()
        bound = atol + rtol * f.abs()
        worst = (err - bound).max().item()
        assert torch.all(err <= bound), (
            f"gradient mismatch for {name}: max excess {worst:.3e}, "
            f"analytic range [{a.min():.3e}, {a.max():.3e}]"
        )
