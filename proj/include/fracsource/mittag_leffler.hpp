#pragma once

#include <memory>

namespace fracsource {

/// A point query for E_{alpha,beta}(-x) on the negative real axis.
struct MLQuery {
    double alpha;  ///< order, in (0, 2]
    double beta;   ///< second parameter, > 0
    double x;      ///< nonnegative; the function is evaluated at -x
};

/// Throws InputDomainError unless alpha in (0,2], beta in (0,500), x >= 0, all finite.
void validate(const MLQuery& q);

/// Evaluator of x |-> E_{alpha,beta}(-x) for one fixed parameter pair.
///
/// Three regimes, switched per argument:
///   - truncated power series in extended precision for small x,
///   - the algebraic asymptotic series, plus the oscillatory branch
///     contribution for alpha >= 1, for large x,
///   - an adaptive-precision power series (MPFR) bridging the band where
///     neither of the above reaches tolerance.
/// Every regime carries an a-posteriori error estimate and the dispatcher only
/// accepts a value whose estimate meets the target (~1e-11 relative), so the
/// thresholds themselves are not accuracy-critical.
///
/// Construction precomputes Gamma tables, making repeated evaluations cheap
/// (quadrature weight generation evaluates this millions of times). Instances
/// are immutable after construction and safe to share between threads.
class MLFunction {
public:
    MLFunction(double alpha, double beta);
    ~MLFunction();
    MLFunction(MLFunction&&) noexcept;
    MLFunction& operator=(MLFunction&&) noexcept;
    MLFunction(const MLFunction&) = delete;
    MLFunction& operator=(const MLFunction&) = delete;

    /// E_{alpha,beta}(-x), x >= 0.
    double operator()(double x) const;

    double alpha() const;
    double beta() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot evaluation of E_{alpha,beta}(-x). Uses a small thread-local cache
/// of MLFunction instances keyed by (alpha, beta).
double ml_eval(double alpha, double beta, double x);
double ml_eval(const MLQuery& q);

/// t^beta * E_{alpha,beta+1}(-lambda t^alpha), which equals the primitive
///   integral_0^t s^(beta-1) E_{alpha,beta}(-lambda s^alpha) ds.
/// These are the exact kernel moments behind the product-integration weights.
double ml_kernel_primitive(double alpha, double beta, double lambda, double t);

}  // namespace fracsource
