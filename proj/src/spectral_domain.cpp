#include "fracsource/spectral_domain.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "fracsource/errors.hpp"

namespace fracsource {

void DomainSpec::check() const {
    if (!(lateral_length > 0.0) || !(ell > 0.0) || lateral_length2 < 0.0)
        throw InputDomainError("domain lengths must be strictly positive");
}

double AxialProfile::value(double z, double ell) const {
    switch (kind) {
        case Kind::constant: return base;
        case Kind::cosine: return base + amp * std::cos(M_PI * z / ell);
        case Kind::quadratic: return base + amp * (z / ell) * (z / ell);
    }
    return base;
}

double AxialProfile::d1(double z, double ell) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::cosine: return -amp * (M_PI / ell) * std::sin(M_PI * z / ell);
        case Kind::quadratic: return 2.0 * amp * z / (ell * ell);
    }
    return 0.0;
}

double AxialProfile::d2(double z, double ell) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::cosine: return -amp * (M_PI / ell) * (M_PI / ell) * std::cos(M_PI * z / ell);
        case Kind::quadratic: return 2.0 * amp / (ell * ell);
    }
    return 0.0;
}

double AxialProfile::min_value(double ell) const {
    switch (kind) {
        case Kind::constant: return base;
        case Kind::cosine: return base - std::fabs(amp);
        case Kind::quadratic: return amp >= 0.0 ? base : base + amp;
    }
    return base;
}

AxialProfile AxialProfile::parse(const std::string& name, double base, double amp) {
    AxialProfile p;
    p.base = base;
    p.amp = amp;
    if (name == "constant")
        p.kind = Kind::constant;
    else if (name == "cosine")
        p.kind = Kind::cosine;
    else if (name == "quadratic")
        p.kind = Kind::quadratic;
    else
        throw InputDomainError("unknown axial coefficient profile '" + name + "'");
    return p;
}

void CoefficientField::check(const DomainSpec& domain) const {
    if (lateral_cross != 0.0)
        throw UnsupportedError(
            "lateral cross coefficients break the separable basis; only diagonal "
            "constant lateral matrices are supported");
    if (!(lateral_coeff > 0.0))
        throw EllipticityError("lateral coefficient must be positive");
    if (domain.has_second_lateral() && !(lateral_coeff2 > 0.0))
        throw EllipticityError("second lateral coefficient must be positive");
    if (!(a_dd.min_value(domain.ell) > 0.0))
        throw EllipticityError("a_dd must be bounded below by a positive constant");
}

BoundaryVariant BoundaryVariant::mn(int m, int n) {
    if ((m != 0 && m != 1) || (n != 0 && n != 1))
        throw InputDomainError("boundary variant indices must be 0 or 1");
    return {m, n, false};
}

BoundaryVariant BoundaryVariant::parse(const std::string& name) {
    if (name == "full_dirichlet" || name == "mn00") return full_dirichlet();
    if (name == "neumann_axial" || name == "mn10") return neumann_axial();
    if (name == "mn01") return mn(0, 1);
    if (name == "mn11") return mn(1, 1);
    if (name == "mixed_axial") return mixed_axial();
    throw InputDomainError("unknown boundary variant '" + name + "'");
}

std::string BoundaryVariant::name() const {
    if (mixed) return "mixed_axial";
    return "mn" + std::to_string(m) + std::to_string(n);
}

Eigen::VectorXd LateralBasis::project(const Eigen::VectorXd& grid_values) const {
    if (grid_values.size() != npoints)
        throw InputDomainError("lateral grid size mismatch in projection");
    return projector * grid_values;
}

Eigen::VectorXd LateralBasis::synthesize(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != count)
        throw InputDomainError("lateral coefficient count mismatch in synthesis");
    return values * coeffs;
}

namespace {

struct Family1D {
    Eigen::VectorXd x, w, mu;
    Eigen::MatrixXd values;
};

// Sine (Dirichlet) or cosine (Neumann) eigenfamily of -a g'' on (0, L),
// L2-normalized; trapezoid weights give exact discrete orthonormality.
Family1D interval_family(double L, double a, bool dirichlet, int K, int npts) {
    if (npts < 2 * K + 2)
        throw InputDomainError("lateral grid too coarse for the requested mode count");
    Family1D f;
    f.x.resize(npts);
    f.w.resize(npts);
    const double h = L / (npts - 1);
    for (int i = 0; i < npts; ++i) {
        f.x[i] = i * h;
        f.w[i] = (i == 0 || i == npts - 1) ? 0.5 * h : h;
    }
    f.mu.resize(K);
    f.values.resize(npts, K);
    for (int k = 0; k < K; ++k) {
        const int mode = dirichlet ? k + 1 : k;
        const double wavenumber = mode * M_PI / L;
        f.mu[k] = a * wavenumber * wavenumber;
        for (int i = 0; i < npts; ++i) {
            if (dirichlet)
                f.values(i, k) = std::sqrt(2.0 / L) * std::sin(wavenumber * f.x[i]);
            else
                f.values(i, k) = (mode == 0) ? 1.0 / std::sqrt(L)
                                             : std::sqrt(2.0 / L) * std::cos(wavenumber * f.x[i]);
        }
    }
    return f;
}

}  // namespace

LateralBasis lateral_modes(const DomainSpec& domain, const CoefficientField& coeffs,
                           const BoundaryVariant& variant, int K, int npoints_per_dim) {
    domain.check();
    coeffs.check(domain);
    const bool dirichlet = variant.mixed ? true : (variant.n == 0);

    LateralBasis out;
    const Family1D f1 =
        interval_family(domain.lateral_length, coeffs.lateral_coeff, dirichlet, K, npoints_per_dim);

    if (!domain.has_second_lateral()) {
        out.count = K;
        out.npoints = npoints_per_dim;
        out.points.resize(out.npoints, 1);
        out.points.col(0) = f1.x;
        out.weights = f1.w;
        out.mu = f1.mu;
        out.values = f1.values;
    } else {
        const Family1D f2 = interval_family(domain.lateral_length2, coeffs.lateral_coeff2,
                                            dirichlet, K, npoints_per_dim);
        const int n1 = npoints_per_dim, n2 = npoints_per_dim;
        out.count = K * K;
        out.npoints = n1 * n2;
        out.points.resize(out.npoints, 2);
        out.weights.resize(out.npoints);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) {
                const int p = i * n2 + j;
                out.points(p, 0) = f1.x[i];
                out.points(p, 1) = f2.x[j];
                out.weights[p] = f1.w[i] * f2.w[j];
            }
        out.mu.resize(out.count);
        out.values.resize(out.npoints, out.count);
        for (int k1 = 0; k1 < K; ++k1)
            for (int k2 = 0; k2 < K; ++k2) {
                const int k = k1 * K + k2;
                out.mu[k] = f1.mu[k1] + f2.mu[k2];
                for (int i = 0; i < n1; ++i)
                    for (int j = 0; j < n2; ++j)
                        out.values(i * n2 + j, k) = f1.values(i, k1) * f2.values(j, k2);
            }
    }
    out.projector = out.values.transpose() * out.weights.asDiagonal();
    return out;
}

namespace {

void axial_closed_form(AxialBasis& b, const DomainSpec& domain, double a,
                       const BoundaryVariant& variant, int J) {
    const double ell = domain.ell;
    b.nu.resize(J);
    b.values.resize(b.npoints, J);
    b.deriv.resize(b.npoints, J);
    b.deriv2.resize(b.npoints, J);

    for (int j = 0; j < J; ++j) {
        double wavenumber, norm;
        std::function<double(double)> shape, dshape;
        if (variant.mixed) {
            // on (0, ell): chi'(0) = 0, chi(ell) = 0
            wavenumber = (j + 0.5) * M_PI / ell;
            norm = std::sqrt(2.0 / ell);
            shape = [=](double z) { return norm * std::cos(wavenumber * z); };
            dshape = [=](double z) { return -norm * wavenumber * std::sin(wavenumber * z); };
        } else if (variant.m == 0) {
            // Dirichlet at +/- ell
            wavenumber = (j + 1) * M_PI / (2.0 * ell);
            norm = 1.0 / std::sqrt(ell);
            shape = [=](double z) { return norm * std::sin(wavenumber * (z + ell)); };
            dshape = [=](double z) { return norm * wavenumber * std::cos(wavenumber * (z + ell)); };
        } else {
            // Neumann at +/- ell
            wavenumber = j * M_PI / (2.0 * ell);
            norm = (j == 0) ? 1.0 / std::sqrt(2.0 * ell) : 1.0 / std::sqrt(ell);
            shape = [=](double z) { return norm * std::cos(wavenumber * (z + ell)); };
            dshape = [=](double z) { return -norm * wavenumber * std::sin(wavenumber * (z + ell)); };
        }
        b.nu[j] = a * wavenumber * wavenumber;
        for (int i = 0; i < b.npoints; ++i) {
            const double z = b.z[i];
            b.values(i, j) = shape(z);
            b.deriv(i, j) = dshape(z);
            b.deriv2(i, j) = -(b.nu[j] / a) * b.values(i, j);
        }
    }
    b.end_value = b.values.row(b.npoints - 1).transpose();
    b.end_deriv = b.deriv.row(b.npoints - 1).transpose();
}

void axial_numeric(AxialBasis& b, const DomainSpec& domain, const AxialProfile& a_dd,
                   const BoundaryVariant& variant, int J) {
    const double ell = domain.ell;
    const int np = b.npoints;
    const double h = b.z[1] - b.z[0];

    const bool left_dirichlet = variant.mixed ? false : (variant.m == 0);
    const bool right_dirichlet = variant.mixed ? true : (variant.m == 0);

    const int lo = left_dirichlet ? 1 : 0;
    const int hi = right_dirichlet ? np - 2 : np - 1;
    const int n_active = hi - lo + 1;
    if (n_active < J)
        throw InputDomainError("axial grid too coarse for the requested mode count");

    // P1 stiffness with midpoint coefficient samples, lumped mass; the
    // transformed problem D^{-1/2} K D^{-1/2} is symmetric tridiagonal.
    Eigen::VectorXd kdiag = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd koff = Eigen::VectorXd::Zero(np - 1);
    for (int i = 0; i + 1 < np; ++i) {
        const double am = a_dd.value(0.5 * (b.z[i] + b.z[i + 1]), ell);
        if (!(am > 0.0)) throw EllipticityError("a_dd nonpositive inside the axial interval");
        kdiag[i] += am / h;
        kdiag[i + 1] += am / h;
        koff[i] -= am / h;
    }
    Eigen::VectorXd mass(np);
    for (int i = 0; i < np; ++i) mass[i] = (i == 0 || i == np - 1) ? 0.5 * h : h;

    std::vector<double> d(n_active), e(std::max(1, n_active - 1));
    for (int i = 0; i < n_active; ++i) d[i] = kdiag[lo + i] / mass[lo + i];
    for (int i = 0; i + 1 < n_active; ++i)
        e[i] = koff[lo + i] / std::sqrt(mass[lo + i] * mass[lo + i + 1]);

    // bisection / Sturm-sequence solver for the J smallest eigenpairs only
    std::vector<double> w(n_active);
    Eigen::MatrixXd zvec(n_active, J);
    std::vector<lapack_int> isuppz(2 * std::max(1, J));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n_active, d.data(), e.data(), 0.0, 0.0, 1, J, 0.0, &found,
        w.data(), zvec.data(), n_active, isuppz.data());
    if (info != 0 || found < J)
        throw NumericalError("axial eigensolver failed to converge (dstevr info=" +
                             std::to_string(info) + ")");

    b.nu.resize(J);
    for (int j = 0; j < J; ++j) b.nu[j] = w[j];
    b.values = Eigen::MatrixXd::Zero(np, J);
    for (int j = 0; j < J; ++j) {
        Eigen::VectorXd chi = zvec.col(j);
        for (int i = 0; i < n_active; ++i) chi[i] /= std::sqrt(mass[lo + i]);
        // deterministic sign: largest-magnitude entry positive
        int imax = 0;
        for (int i = 1; i < n_active; ++i)
            if (std::fabs(chi[i]) > std::fabs(chi[imax])) imax = i;
        if (chi[imax] < 0.0) chi = -chi;
        b.values.block(lo, j, n_active, 1) = chi;
    }

    // chi' by second-order differences (one-sided 3-point at the ends),
    // chi'' exactly from the eigen-equation a chi'' = -(nu chi + a' chi')
    b.deriv.resize(np, J);
    b.deriv2.resize(np, J);
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < np; ++i) {
            if (i == 0)
                b.deriv(i, j) =
                    (-3.0 * b.values(0, j) + 4.0 * b.values(1, j) - b.values(2, j)) / (2.0 * h);
            else if (i == np - 1)
                b.deriv(i, j) = (3.0 * b.values(np - 1, j) - 4.0 * b.values(np - 2, j) +
                                 b.values(np - 3, j)) /
                                (2.0 * h);
            else
                b.deriv(i, j) = (b.values(i + 1, j) - b.values(i - 1, j)) / (2.0 * h);
        }
        for (int i = 0; i < np; ++i) {
            const double z = b.z[i];
            b.deriv2(i, j) = -(b.nu[j] * b.values(i, j) + a_dd.d1(z, ell) * b.deriv(i, j)) /
                             a_dd.value(z, ell);
        }
    }
    b.end_value = b.values.row(np - 1).transpose();
    b.end_deriv = b.deriv.row(np - 1).transpose();
}

}  // namespace

AxialBasis axial_modes(const DomainSpec& domain, const AxialProfile& a_dd,
                       const BoundaryVariant& variant, int J, int nz) {
    domain.check();
    if (variant.mixed != domain.half_cylinder)
        throw InputDomainError(
            "the mixed axial variant lives on the half-cylinder and the full-cylinder "
            "variants on (-ell, ell); domain and variant disagree");
    if (nz < 8 * J)
        throw InputDomainError("axial resolution must satisfy nz >= 8 J (got nz=" +
                               std::to_string(nz) + ", J=" + std::to_string(J) + ")");
    if (!(a_dd.min_value(domain.ell) > 0.0))
        throw EllipticityError("a_dd must be positive on the axial interval");

    AxialBasis b;
    b.count = J;
    b.npoints = nz + 1;
    b.z.resize(b.npoints);
    b.weights.resize(b.npoints);
    const double z0 = domain.half_cylinder ? 0.0 : -domain.ell;
    const double z1 = domain.ell;
    const double h = (z1 - z0) / nz;
    for (int i = 0; i <= nz; ++i) {
        b.z[i] = z0 + i * h;
        b.weights[i] = (i == 0 || i == nz) ? 0.5 * h : h;
    }

    if (a_dd.is_constant())
        axial_closed_form(b, domain, a_dd.base, variant, J);
    else
        axial_numeric(b, domain, a_dd, variant, J);

    b.projector = b.values.transpose() * b.weights.asDiagonal();
    return b;
}

SpectralBasis assemble_basis(const DomainSpec& domain, const CoefficientField& coeffs,
                             const BoundaryVariant& variant, int K, int J, int nz,
                             int nx_per_dim) {
    SpectralBasis basis;
    basis.domain = domain;
    basis.coeffs = coeffs;
    basis.variant = variant;
    basis.K = K;
    basis.J = J;
    basis.lateral = lateral_modes(domain, coeffs, variant, K, nx_per_dim);
    basis.axial = axial_modes(domain, coeffs.a_dd, variant, J, nz);

    basis.modes.reserve(basis.mode_count());
    for (int k = 0; k < basis.lateral.count; ++k)
        for (int j = 0; j < basis.axial.count; ++j) {
            Eigenmode m;
            m.lateral_index = k;
            m.axial_index = j;
            m.mu = basis.lateral.mu[k];
            m.nu = basis.axial.nu[j];
            m.lambda = m.mu + m.nu;
            m.endpoint_derivative = basis.axial.end_deriv[j];
            basis.modes.push_back(m);
        }
    std::stable_sort(basis.modes.begin(), basis.modes.end(),
                     [](const Eigenmode& a, const Eigenmode& b) { return a.lambda < b.lambda; });

    const double lambda_min = basis.modes.front().lambda;
    if (lambda_min < -1e-10)
        throw NumericalError("negative eigenvalue in assembled basis");
    if (variant.any_dirichlet() && !(lambda_min > 0.0))
        throw NumericalError("Dirichlet variant produced a nonpositive eigenvalue");
    return basis;
}

Eigen::MatrixXd SpectralBasis::project(const Eigen::MatrixXd& frame) const {
    if (frame.rows() != lateral.npoints || frame.cols() != axial.npoints)
        throw InputDomainError("frame shape does not match the basis grids");
    return lateral.projector * frame * axial.projector.transpose();
}

Eigen::MatrixXd SpectralBasis::synthesize(const Eigen::MatrixXd& modal) const {
    if (modal.rows() != lateral.count || modal.cols() != axial.count)
        throw InputDomainError("modal shape does not match the basis");
    return lateral.values * modal * axial.values.transpose();
}

double SpectralBasis::l2_norm(const Eigen::MatrixXd& frame) const {
    const Eigen::VectorXd row_sums = (frame.array() * frame.array()).matrix() * axial.weights;
    return std::sqrt(std::max(0.0, lateral.weights.dot(row_sums)));
}

Eigen::MatrixXd apply_dxA(const SpectralBasis& basis, const Eigen::MatrixXd& modal) {
    if (modal.rows() != basis.lateral.count || modal.cols() != basis.axial.count)
        throw InputDomainError("modal shape does not match the basis");
    const auto& ax = basis.axial;
    const double ell = basis.domain.ell;
    // combo(:, j) = a' chi_j'' + a'' chi_j'  (the axial factor of B1 w + B2 u)
    Eigen::MatrixXd combo(ax.npoints, ax.count);
    for (int i = 0; i < ax.npoints; ++i) {
        const double a1 = basis.coeffs.a_dd.d1(ax.z[i], ell);
        const double a2 = basis.coeffs.a_dd.d2(ax.z[i], ell);
        for (int j = 0; j < ax.count; ++j)
            combo(i, j) = a1 * ax.deriv2(i, j) + a2 * ax.deriv(i, j);
    }
    return basis.lateral.values * modal * combo.transpose();
}

namespace {

Eigen::MatrixXd axial_fd_derivative(const Eigen::MatrixXd& frame, double h) {
    const int nc = static_cast<int>(frame.cols());
    Eigen::MatrixXd out(frame.rows(), nc);
    out.col(0) = (-3.0 * frame.col(0) + 4.0 * frame.col(1) - frame.col(2)) / (2.0 * h);
    for (int i = 1; i + 1 < nc; ++i) out.col(i) = (frame.col(i + 1) - frame.col(i - 1)) / (2.0 * h);
    out.col(nc - 1) =
        (3.0 * frame.col(nc - 1) - 4.0 * frame.col(nc - 2) + frame.col(nc - 3)) / (2.0 * h);
    return out;
}

}  // namespace

Eigen::MatrixXd apply_dxA_grid(const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                               const AxialProfile& a_dd, const Eigen::VectorXd& z, double ell) {
    if (w.rows() != u.rows() || w.cols() != u.cols() || w.cols() != z.size())
        throw InputDomainError("apply_dxA_grid: field shapes disagree");
    const double h = z[1] - z[0];
    const Eigen::MatrixXd dw = axial_fd_derivative(w, h);
    const Eigen::MatrixXd du = axial_fd_derivative(u, h);
    Eigen::MatrixXd out(w.rows(), w.cols());
    for (int i = 0; i < w.cols(); ++i) {
        const double a1 = a_dd.d1(z[i], ell);
        const double a2 = a_dd.d2(z[i], ell);
        out.col(i) = a1 * dw.col(i) + a2 * du.col(i);
    }
    return out;
}

Eigen::VectorXd trace_tau1(const SpectralBasis& basis, const Eigen::MatrixXd& modal,
                           const Eigen::VectorXd& R_face, double floor) {
    if (R_face.size() != basis.lateral.npoints)
        throw InputDomainError("R face values do not match the lateral grid");
    if (R_face.cwiseAbs().minCoeff() < floor)
        throw PreconditionError(
            "source profile face floor violated: |R(t, x', ell)| must stay away from zero "
            "on the measurement face");
    const double a_end = basis.coeffs.a_dd.value(basis.domain.ell, basis.domain.ell);
    const Eigen::VectorXd lateral_coeffs = modal * basis.axial.end_deriv;
    Eigen::VectorXd face = basis.lateral.values * lateral_coeffs * a_end;
    return face.cwiseQuotient(R_face);
}

}  // namespace fracsource
