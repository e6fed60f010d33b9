#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fracsource {

/// Cylinder geometry: omega x (-ell, ell), or omega x (0, ell) for the
/// half-cylinder problems. omega is the interval (0, L) in the d = 2 baseline;
/// setting lateral_length2 > 0 switches to omega = (0,L1) x (0,L2) (d = 3).
struct DomainSpec {
    double lateral_length = M_PI;
    double lateral_length2 = 0.0;  // 0 disables the second lateral direction
    double ell = 1.0;
    bool half_cylinder = false;

    bool has_second_lateral() const { return lateral_length2 > 0.0; }
    void check() const;
};

/// Named closed-form profiles for the axial coefficient a_dd(x_d). All are
/// even in x_d (the half-cylinder reduction requires that symmetry) and carry
/// exact first and second derivatives.
struct AxialProfile {
    enum class Kind { constant, cosine, quadratic };
    Kind kind = Kind::constant;
    double base = 1.0;
    double amp = 0.0;

    double value(double z, double ell) const;
    double d1(double z, double ell) const;
    double d2(double z, double ell) const;
    bool is_constant() const { return kind == Kind::constant || amp == 0.0; }
    /// minimum over [-ell, ell]; must stay positive (ellipticity)
    double min_value(double ell) const;

    static AxialProfile parse(const std::string& name, double base, double amp);
};

/// Coefficients of the elliptic operator. The lateral block is a constant
/// diagonal matrix (a general constant SPD matrix with lateral cross terms
/// would break the separable basis and is rejected), the axial coefficient
/// a_dd depends on x_d only, and the mixed entries a_{jd} are identically
/// zero, which keeps the operator separable.
struct CoefficientField {
    double lateral_coeff = 1.0;
    double lateral_coeff2 = 0.0;   // used when the domain has a second lateral direction
    double lateral_cross = 0.0;    // must be zero; kept so configs can state it explicitly
    AxialProfile a_dd;

    void check(const DomainSpec& domain) const;
};

/// Boundary-condition variant. m selects the axial condition on x_d = +/-ell
/// (0 = Dirichlet, 1 = Neumann), n the lateral condition on the wall
/// (0 = Dirichlet, 1 = Neumann). The mixed variant lives on the half-cylinder
/// (0, ell): Neumann at x_d = 0, Dirichlet at x_d = ell, Dirichlet walls.
struct BoundaryVariant {
    int m = 0;
    int n = 0;
    bool mixed = false;

    static BoundaryVariant full_dirichlet() { return {0, 0, false}; }
    static BoundaryVariant neumann_axial() { return {1, 0, false}; }
    static BoundaryVariant mn(int m, int n);
    static BoundaryVariant mixed_axial() { return {0, 0, true}; }
    static BoundaryVariant parse(const std::string& name);

    bool axial_dirichlet_at_ell() const { return mixed || m == 0; }
    bool any_dirichlet() const { return mixed || m == 0 || n == 0; }
    std::string name() const;
    bool operator==(const BoundaryVariant&) const = default;
};

struct Eigenmode {
    int lateral_index = 0;  // flattened lateral index
    int axial_index = 0;
    double mu = 0.0;
    double nu = 0.0;
    double lambda = 0.0;
    double endpoint_derivative = 0.0;  // chi'(ell)
};

/// Lateral eigenstructure: 1D sine/cosine family, or their tensor square for
/// d = 3, sampled on the lateral grid. values is (#points x #modes).
struct LateralBasis {
    int count = 0;
    int npoints = 0;
    Eigen::MatrixXd points;       // (#points x dims) coordinates
    Eigen::VectorXd weights;      // quadrature weights
    Eigen::VectorXd mu;           // eigenvalues, size count
    Eigen::MatrixXd values;       // (#points x count)
    Eigen::MatrixXd projector;    // (count x #points) = values^T * diag(weights)

    Eigen::VectorXd project(const Eigen::VectorXd& grid_values) const;
    Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;
};

/// Axial eigenstructure of -(a_dd chi')' under the variant's axial conditions,
/// on the nodes of a uniform axial grid.
struct AxialBasis {
    int count = 0;
    int npoints = 0;
    Eigen::VectorXd z;            // axial nodes
    Eigen::VectorXd weights;      // trapezoid / lumped-mass weights
    Eigen::VectorXd nu;           // eigenvalues, size count
    Eigen::MatrixXd values;       // chi_j sampled, (#points x count)
    Eigen::MatrixXd deriv;        // chi_j'
    Eigen::MatrixXd deriv2;       // chi_j''
    Eigen::VectorXd end_value;    // chi_j(ell)
    Eigen::VectorXd end_deriv;    // chi_j'(ell)
    Eigen::MatrixXd projector;    // (count x #points)
};

/// Tensor-product eigenbasis of the elliptic operator on the cylinder.
/// Immutable once assembled; safe to share across threads.
struct SpectralBasis {
    DomainSpec domain;
    CoefficientField coeffs;
    BoundaryVariant variant;
    int K = 0;  // lateral modes (per direction for d = 3)
    int J = 0;  // axial modes

    LateralBasis lateral;
    AxialBasis axial;
    std::vector<Eigenmode> modes;  // sorted by nondecreasing lambda

    int mode_count() const { return lateral.count * axial.count; }
    int flat_index(int k, int j) const { return k * axial.count + j; }
    double lambda_flat(int flat) const {
        return lateral.mu[flat / axial.count] + axial.nu[flat % axial.count];
    }

    /// L2 projection of a grid frame (#lateral points x #axial points) onto
    /// the basis; returns (lateral.count x axial.count).
    Eigen::MatrixXd project(const Eigen::MatrixXd& frame) const;
    /// Adjoint of project: modal coefficients back to grid samples.
    Eigen::MatrixXd synthesize(const Eigen::MatrixXd& modal) const;

    /// Discrete L2(Omega) inner-product weight of a grid frame.
    double l2_norm(const Eigen::MatrixXd& frame) const;
};

/// Lateral eigenpairs: (index, mu_k, sampled eigenfunction) on a fresh grid of
/// npoints_per_dim nodes per lateral direction.
LateralBasis lateral_modes(const DomainSpec& domain, const CoefficientField& coeffs,
                           const BoundaryVariant& variant, int K, int npoints_per_dim);

/// Axial eigenpairs. Closed-form cosine/sine families when a_dd is constant,
/// otherwise a symmetric second-order discretization of -(a_dd chi')' solved
/// as a tridiagonal eigenproblem. Requires nz >= 8 J intervals.
AxialBasis axial_modes(const DomainSpec& domain, const AxialProfile& a_dd,
                       const BoundaryVariant& variant, int J, int nz);

SpectralBasis assemble_basis(const DomainSpec& domain, const CoefficientField& coeffs,
                             const BoundaryVariant& variant, int K, int J, int nz,
                             int nx_per_dim);

/// B1 w + B2 u = -(d/dx_d A) u evaluated on the grid for a modal field, using
/// w = du/dx_d. With the separable coefficient class this is
///   a_dd'(x_d) dw/dx_d + a_dd''(x_d) w.
Eigen::MatrixXd apply_dxA(const SpectralBasis& basis, const Eigen::MatrixXd& modal);

/// Same quantity from grid samples of w and u (axial derivatives by finite
/// differences); used by callers that do not hold a modal representation.
Eigen::MatrixXd apply_dxA_grid(const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                               const AxialProfile& a_dd, const Eigen::VectorXd& z,
                               double ell);

/// tau_1: a_dd(ell) * d/dx_d y(t, x', ell) / R(t, x', ell) for one time slice
/// of a modal field. R_face must stay away from zero (the face floor
/// precondition); entries below `floor` raise PreconditionError.
Eigen::VectorXd trace_tau1(const SpectralBasis& basis, const Eigen::MatrixXd& modal,
                           const Eigen::VectorXd& R_face, double floor = 1e-14);

}  // namespace fracsource
