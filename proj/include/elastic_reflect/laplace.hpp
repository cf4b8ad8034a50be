#pragma once

#include <optional>
#include <vector>

#include "elastic_reflect/model.hpp"
#include "elastic_reflect/phi_solver.hpp"

namespace elastic_reflect {

/// Inverse-local-time transform query: E[exp(-lambda * tau_ell)] for the
/// limiting process, or of its eps-jump approximation when eps is set.
struct LaplaceQuery {
    ValidatedModel model;
    BoundarySpec boundary;
    double lambda = 1.0;
    double ell = 1.0;
    std::optional<double> eps;
};

enum class Route {
    integral,     // single integral with the eps-grid shift (or its limit)
    product,      // per-excursion eigenfunction ratios
    closed_form,  // empty integral/product: value is exactly 1
};

struct LaplaceResult {
    double value = 1.0;
    double quadrature_error = 0.0;
    Route route = Route::closed_form;
};

const char* route_name(Route r);

/// Limiting transform: exp(-int_0^ell (g'(a) + 1) u_lambda(g(a)) da).
/// The g' singularity of sqrt/power boundaries at a = 0 is removed exactly
/// by substitution.
LaplaceResult limit_lt(const LaplaceQuery& q, const SolverOptions& opts = {});

/// Discrete transform of tau^eps_ell: same integrand with the argument of u
/// shifted to g(a) + a - eps*ceil(a/eps), integrated cell by cell so the
/// grid discontinuities land on panel boundaries.
LaplaceResult discrete_lt(const LaplaceQuery& q, const SolverOptions& opts = {});

/// Same quantity as discrete_lt via the per-excursion product
///   prod_n Phi(g(l_n - eps) - eps) / Phi(g(l_n)),  l_n = n*eps,
/// evaluated as exp(-sum of integrals of u). Mathematically identical to
/// discrete_lt but numerically independent (different quadrature
/// decomposition), so the pair forms a cross-check.
LaplaceResult discrete_lt_product(const LaplaceQuery& q,
                                  const SolverOptions& opts = {});

/// Number of whole eps-cells in [0, ell], snapping quotients that are within
/// 1e-9 of an integer so that ladders like eps = 0.1 with ell = 1 do not
/// lose a cell to floating-point rounding.
long cell_count(double ell, double eps);

namespace detail {

/// Per-cell exponents I_k of the discrete transform (value = exp(-sum I_k)),
/// shared by discrete_lt and the liquidation sweep. `error` accumulates the
/// quadrature error estimates.
struct CellExponents {
    std::vector<double> exponents;
    double error = 0.0;
};
CellExponents discrete_cell_exponents(LogDerivativeSolver& solver,
                                      const BoundarySpec& g, double eps, long n,
                                      const SolverOptions& opts);

}  // namespace detail

}  // namespace elastic_reflect
