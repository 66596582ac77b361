"""Reference QP oracle for the linear SVM solver test.

Draws a 50x10 linearly separable two-class problem and solves the
soft-margin SVM dual with cvxopt's interior-point QP solver. Writes the
data and the optimal objective values used as frozen expectations.
"""
import numpy as np
from cvxopt import matrix, solvers

rng = np.random.default_rng(20190607)
n, d, C = 50, 10, 1.0
direction = rng.normal(size=d)
direction /= np.linalg.norm(direction)
y = np.where(np.arange(n) < n // 2, -1.0, 1.0)
X = rng.normal(scale=0.6, size=(n, d)) + np.outer(y, direction) * 1.2
# keep the problem separable: drop nothing, just verify with a margin check below

K = X @ X.T
Q = np.outer(y, y) * K
solvers.options.update(show_progress=False, abstol=1e-14, reltol=1e-14, feastol=1e-14, maxiters=200)
sol = solvers.qp(matrix(Q), matrix(-np.ones(n)),
                 matrix(np.vstack([-np.eye(n), np.eye(n)])),
                 matrix(np.hstack([np.zeros(n), C * np.ones(n)])),
                 matrix(y.reshape(1, -1)), matrix(0.0))
alpha = np.array(sol["x"]).ravel()
w = (alpha * y) @ X
dual = alpha.sum() - 0.5 * w @ w

# Primal objective minimised over b for the oracle w (1-D convex, exact on breakpoints).
def primal(b):
    return 0.5 * w @ w + C * np.maximum(0.0, 1.0 - y * (X @ w + b)).sum()
cands = [(1.0 - y[i] * (X[i] @ w)) * y[i] for i in range(n)]
best_b = min(cands, key=primal)
print("dual", repr(dual), "primal", repr(primal(best_b)), "min margin sign check",
      np.min(y * (X @ w + best_b)))

with open("qp_50x10.csv", "w") as f:
    f.write("label," + ",".join(f"x{j}" for j in range(d)) + "\n")
    for i in range(n):
        f.write(("1" if y[i] > 0 else "0") + "," + ",".join(repr(float(v)) for v in X[i]) + "\n")
with open("qp_50x10_objective.txt", "w") as f:
    f.write(f"C {C!r}\ndual {float(dual)!r}\nprimal {float(primal(best_b))!r}\n")
