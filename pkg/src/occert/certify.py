"""Decision layer: spectral pinching, positivity-class certification and
refutation, the nondegeneracy lemma for perturbed (1,1)-forms, and the
perturbation budget.

Certification is three-valued.  The sufficient bound proves membership,
the frame search can only disprove it, and everything else is reported
as unknown; a failed search is never upgraded to a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .curvature import (
    CurvatureOperator,
    curvature_operator,
    frobenius_norm,
    kulkarni_nomizu_square,
    operator_apply,
    ricci_star,
)
from .errors import ConditioningError, InputError
from .hermitian import (
    fundamental_two_form,
    is_positive_form,
    norm_lambda2,
    random_orthogonal_complex_structure,
    standard_complex_structure,
)
from .rng import make_rng

P_THRESHOLD = 1.0 / 6.0          # sufficient sup-norm bound for dim 6
TIE_TOL = 1e-12                  # strict inequalities: ties reported as fail
LL_RADIUS = 0.5 / math.sqrt(3.0)  # nondegeneracy radius 1/(2 sqrt(n)), n = 3


@dataclass(frozen=True)
class BhlResult:
    passed: bool
    lambda_min: float
    lambda_max: float
    margin: float                # 7 lambda_min - 5 lambda_max
    boundary: bool               # a tie within TIE_TOL decided the outcome


@dataclass(frozen=True)
class Witness:
    """Refuting pair: orthogonal complex structure and unit direction."""

    J: np.ndarray
    X: np.ndarray
    value: float


@dataclass(frozen=True)
class PMembership:
    status: str                  # 'certified' | 'refuted' | 'unknown'
    sup_lower: float
    sup_upper: float
    threshold: float
    witness: Witness | None = None


@dataclass(frozen=True)
class LemmaLLResult:
    hypotheses_met: bool
    nondegenerate: bool
    det_value: float
    deviation: float             # |zeta - zeta0| in the 2-form norm


@dataclass(frozen=True)
class PerturbationBudget:
    eps1: float                  # curvature deviation, sup norm
    eps2: float                  # metric deviation, sup norm

    def __post_init__(self):
        if self.eps1 < 0 or self.eps2 < 0:
            raise InputError("perturbation budget entries must be nonnegative")


@dataclass(frozen=True)
class BudgetCheck:
    quadratic_ok: bool
    linear_ok: bool
    implied_bound: float


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the refutation search (engineering defaults)."""

    multistarts: int = 64
    max_iter: int = 80
    fd_eps: float = 1e-5
    grad_tol: float = 1e-10
    step0: float = 0.2
    tol: float = 1e-9            # witness threshold on the negative side
    widen_orientation: bool = False
    short_circuit: bool = False
    seed: int = 0
    workers: int = 1             # starts run in parallel; min-reduction
                                 # keeps the result order-independent


@dataclass(frozen=True)
class RefutationResult:
    witness: Witness | None
    best_value: float
    best_J: np.ndarray
    starts_completed: int


@dataclass(frozen=True)
class Certificate:
    """Per-point verdict record."""

    bhl: BhlResult | None
    p_membership: PMembership | None
    lemma_ll: LemmaLLResult | None
    spectrum: np.ndarray | None
    verdict_notes: str


def check_bhl(spectrum) -> BhlResult:
    """Strict spectral pinching: lambda_min > 0 and 5 lambda_max < 7 lambda_min.

    Scale-invariant, so no normalization of the spectrum is needed.
    """
    spec = np.sort(np.asarray(spectrum, dtype=float))
    if spec.shape != (15,):
        raise InputError("spectrum must have length 15")
    lmin, lmax = float(spec[0]), float(spec[-1])
    margin = 7.0 * lmin - 5.0 * lmax
    scale = max(1.0, abs(lmax))
    tie = TIE_TOL * scale
    boundary = abs(margin) <= tie or abs(lmin) <= tie
    passed = (lmin > tie) and (margin > tie)
    return BhlResult(passed=passed, lambda_min=lmin, lambda_max=lmax,
                     margin=margin, boundary=boundary)


def certify_P_sufficient(R: np.ndarray, g: np.ndarray | None = None,
                         sup_upper_override: float | None = None,
                         threshold: float = P_THRESHOLD) -> PMembership:
    """Sufficient criterion: deviation from the constant-curvature tensor
    bounded by 1/6 in sup norm implies the positivity class.

    The default upper bound is the Frobenius norm of the deviation
    (rigorous for the sup norm); a tighter externally certified bound
    may be supplied via ``sup_upper_override``.
    """
    dev = np.asarray(R, dtype=float) - kulkarni_nomizu_square(g)
    upper = frobenius_norm(dev) if sup_upper_override is None else float(sup_upper_override)
    lower = float(np.max(np.abs(dev)))
    status = "certified" if upper <= threshold else "unknown"
    return PMembership(status=status, sup_lower=lower, sup_upper=upper,
                       threshold=threshold)


def _expm_skew(S: np.ndarray) -> np.ndarray:
    """exp of a real skew matrix via the Hermitian eigendecomposition."""
    w, V = np.linalg.eigh(1j * S)
    return np.real(V @ np.diag(np.exp(-1j * w)) @ V.conj().T)


def _polish_complex_structure(J: np.ndarray) -> np.ndarray:
    """Nearest orthogonal complex structure (polar factor of the skew part)."""
    A = 0.5 * (J - J.T)
    U, _, Vt = np.linalg.svd(A)
    return U @ Vt


def _descend_from(R: np.ndarray, J: np.ndarray, cfg: SearchConfig) -> tuple[float, np.ndarray]:
    step = cfg.step0
    val = kernels.refute_value(R, J)
    for _ in range(cfg.max_iter):
        val, grad = kernels.refute_value_and_grad(R, J, cfg.fd_eps)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < cfg.grad_tol:
            break
        direction = -grad / gnorm
        moved = False
        while step > 1e-12:
            S = np.zeros((6, 6))
            for idx, (p, q) in enumerate(kernels.PAIRS):
                S[q, p] += step * direction[idx]
                S[p, q] -= step * direction[idx]
            E = _expm_skew(S)
            J_try = E @ J @ E.T
            v_try = kernels.refute_value(R, J_try)
            if v_try < val:
                J, val = J_try, v_try
                step *= 1.5
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    J = _polish_complex_structure(J)
    return kernels.refute_value(R, J), J


def refute_P(R: np.ndarray, config: SearchConfig | None = None) -> RefutationResult:
    """Multistart minimization of the smallest eigenvalue of the
    symmetrized star-Ricci form over orthogonal complex structures.

    Returns a witness when a value below -tol is found; ``none found``
    is NOT a membership proof.  Starts are orientation-compatible by
    default (``widen_orientation`` searches both components).
    """
    cfg = config or SearchConfig()
    R = np.asarray(R, dtype=float)

    def run_start(s: int) -> tuple[float, np.ndarray]:
        rng = make_rng(cfg.seed, 211, s)
        orient = True if not cfg.widen_orientation else (s % 2 == 0)
        J0 = random_orthogonal_complex_structure(rng, compatible_orientation=orient).J
        return _descend_from(R, J0, cfg)

    best_val, best_J = np.inf, standard_complex_structure()
    completed = 0
    if cfg.workers > 1 and not cfg.short_circuit and cfg.multistarts > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_start, range(cfg.multistarts)))
        completed = len(results)
        for val, J in results:
            if val < best_val:
                best_val, best_J = val, J
    else:
        for s in range(cfg.multistarts):
            val, J = run_start(s)
            completed += 1
            if val < best_val:
                best_val, best_J = val, J
            if cfg.short_circuit and best_val < -cfg.tol:
                break
    witness = None
    if best_val < -cfg.tol:
        M = ricci_star(R, best_J)
        Ms = 0.5 * (M + M.T)
        eigvals, eigvecs = np.linalg.eigh(Ms)
        X = eigvecs[:, 0]
        k = int(np.argmax(np.abs(X)))
        if X[k] < 0:
            X = -X
        value = float(X @ M @ X)
        witness = Witness(J=best_J, X=X, value=value)
    return RefutationResult(witness=witness, best_value=float(best_val),
                            best_J=best_J, starts_completed=completed)


def check_lemma_LL(zeta0: np.ndarray, zeta: np.ndarray, J: np.ndarray,
                   g: np.ndarray | None = None, tol: float = 1e-9) -> LemmaLLResult:
    """Nondegeneracy of a (1,1)-form within 1/(2 sqrt(n)) of a form >= omega.

    ``hypotheses_met`` requires: both forms of type (1,1), zeta0 - omega
    nonnegative, and |zeta - zeta0| <= 1/(2 sqrt(n)) in the 2-form norm
    (without the radius condition the conclusion would be unsound).
    """
    zeta0 = np.asarray(zeta0, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    J = np.asarray(J, dtype=float)
    omega = fundamental_two_form(g, J)
    dev = norm_lambda2(zeta - zeta0)
    typed = (is_positive_form(zeta0, J, tol) != "not_11"
             and is_positive_form(zeta, J, tol) != "not_11")
    above = is_positive_form(zeta0 - omega, J, tol) in ("positive", "nonnegative")
    hypotheses = typed and above and dev <= LL_RADIUS + TIE_TOL
    det_value = float(np.linalg.det(zeta))
    nondegenerate = abs(det_value) > tol ** zeta.shape[0]
    return LemmaLLResult(hypotheses_met=bool(hypotheses),
                         nondegenerate=bool(nondegenerate),
                         det_value=det_value, deviation=float(dev))


_LINEAR_SLOPE = 2.0 + math.sqrt(13.0 / 3.0)


def perturbation_budget_check(budget: PerturbationBudget) -> BudgetCheck:
    """Budget inequalities for staying inside the certified neighborhood.

    quadratic: eps1 + 4 eps2 + 2 eps2^2 <= 1/6;  linear (which implies
    it): eps1 + (2 + sqrt(13/3)) eps2 <= 1/6.  ``implied_bound`` is
    eps1 + 2 eps2 (2 + eps2), an upper bound for the total curvature
    deviation from the constant-curvature tensor.
    """
    e1, e2 = budget.eps1, budget.eps2
    quadratic_ok = e1 + 4.0 * e2 + 2.0 * e2 * e2 <= P_THRESHOLD
    linear_ok = e1 + _LINEAR_SLOPE * e2 <= P_THRESHOLD
    implied = e1 + 2.0 * e2 * (2.0 + e2)
    return BudgetCheck(quadratic_ok=bool(quadratic_ok), linear_ok=bool(linear_ok),
                       implied_bound=float(implied))


@dataclass(frozen=True)
class CertifyOptions:
    checks: tuple[str, ...] = ("bhl", "p_sufficient")
    multistarts: int = 64
    tol: float = 1e-9
    seed: int = 0
    sym_tol: float = 1e-6        # curvature-identity tolerance (FD input is looser)
    search: SearchConfig | None = None


VALID_CHECKS = ("bhl", "p_sufficient", "p_refute", "lemma_ll_demo")


def _lemma_ll_demo(op: CurvatureOperator, bhl: BhlResult) -> LemmaLLResult:
    """Ties the spectral pinching to the nondegeneracy lemma: rescale the
    operator image of omega into the pinched window (a scale c with
    c * spectrum inside (5/6, 7/6) exists iff the pinching holds),
    project onto (1,1), and check nondegeneracy around zeta0 = omega."""
    J = standard_complex_structure()
    omega = fundamental_two_form(None, J)
    if bhl.passed:
        c = 0.5 * (5.0 / (6.0 * bhl.lambda_min) + 7.0 / (6.0 * bhl.lambda_max))
    else:
        c = 1.0
    zeta_raw = c * operator_apply(op, omega)
    zeta = 0.5 * (zeta_raw + J.T @ zeta_raw @ J)   # (1,1) projection
    return check_lemma_LL(omega, zeta, J)


def certify_point(R: np.ndarray, g: np.ndarray | None = None,
                  options: CertifyOptions | None = None) -> Certificate:
    """Run the requested checks on one algebraic curvature tensor.

    ``R`` is given in a g-orthonormal basis; when a non-identity
    SPD ``g`` is supplied it is only sanity-checked for conditioning
    (the caller is responsible for orthonormalizing).
    """
    opts = options or CertifyOptions()
    unknown = set(opts.checks) - set(VALID_CHECKS)
    if unknown or not opts.checks:
        raise InputError("invalid checks: %s" % sorted(unknown))
    if g is not None:
        cond = np.linalg.cond(np.asarray(g, dtype=float))
        if cond > 1e8:
            raise ConditioningError("metric condition number %.3e too large" % cond)

    op = curvature_operator(R, sym_tol=opts.sym_tol)
    notes = []
    bhl = None
    if "bhl" in opts.checks:
        bhl = check_bhl(op.spectrum)
        notes.append("bhl %s (margin %.3e)" % ("pass" if bhl.passed else "fail", bhl.margin))

    membership = None
    if "p_sufficient" in opts.checks or "p_refute" in opts.checks:
        membership = certify_P_sufficient(R)
        if membership.status != "certified" and "p_refute" in opts.checks:
            cfg = opts.search or SearchConfig(multistarts=opts.multistarts,
                                              tol=opts.tol, seed=opts.seed)
            result = refute_P(R, cfg)
            if result.witness is not None:
                membership = replace(membership, status="refuted",
                                     witness=result.witness)
                notes.append("P refuted: Ric*(X,X) = %.6e" % result.witness.value)
            else:
                notes.append("P search found no witness (best %.6e); status stays unknown"
                             % result.best_value)
        notes.append("P %s (upper %.6e vs %.6e)"
                     % (membership.status, membership.sup_upper, membership.threshold))

    lemma = None
    if "lemma_ll_demo" in opts.checks and bhl is not None:
        lemma = _lemma_ll_demo(op, bhl)
        notes.append("lemma_ll demo: hypotheses %s, nondegenerate %s"
                     % (lemma.hypotheses_met, lemma.nondegenerate))

    return Certificate(bhl=bhl, p_membership=membership, lemma_ll=lemma,
                       spectrum=op.spectrum, verdict_notes="; ".join(notes))
