"""Shrinking toward zero under a normal prior, and why it survives selection."""
from sigfilter.selection import EffectEstimate
from sigfilter.shrinkage import (
    NormalPrior,
    bias_comparison,
    marginal_abs_means,
    posterior,
    rosenbaum_mean,
    selected_abs_means,
    selected_shrinkage_gap,
)

prior = NormalPrior(1.0)
post = posterior(EffectEstimate(b=2.5, se=1.0), prior)
print(f"b=2.5 shrinks to {post.b_star:.3f} (posterior sd {post.s:.3f})")

shrunk, beta, raw = marginal_abs_means(1.0, prior)
print(f"unconditional means |b*|={shrunk:.4f} |beta|={beta:.4f} |b|={raw:.4f}")
print("over- vs under-estimation:", bias_comparison(1.0, prior))

for c in (0.0, 1.96, 4.0):
    s, bt, r = selected_abs_means(1.0, prior, c)
    print(f"|b|>{c}: E|b*|={s:.4f} (direct {rosenbaum_mean(1.0, prior, c):.4f})  E|beta|={bt:.4f}  E|b|={r:.4f}"
          f"  gap={selected_shrinkage_gap(1.0, prior, c):.2e}")
