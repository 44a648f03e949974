#pragma once

#include <functional>
#include <vector>

#include "swlme/mesh.hpp"
#include "swlme/quadrature.hpp"
#include "swlme/state.hpp"

namespace swlme {

//-----------------------------------------------------------------------------
// Orthonormal Legendre basis on the reference cell
//-----------------------------------------------------------------------------

/// phi_m(xi) = sqrt(m + 1/2) P_m(xi), so that the cell mass matrix is
/// (dx/2) times the identity.
namespace basis {

double value(int m, double xi);
double derivative(int m, double xi);  // d/dxi

/// Fills values[0..k] with phi_m(xi).
void values(int k, double xi, double* out);
void derivatives(int k, double xi, double* out);

}  // namespace basis

//-----------------------------------------------------------------------------
// Modal field
//-----------------------------------------------------------------------------

/// Per-cell modal coefficients for a vector-valued DG unknown:
/// ncomp components, polynomial degree k, on nx cells. Storage is
/// cell-major: coeff(j, c, m) at ((j * ncomp) + c) * (k+1) + m.
class ModalField {
 public:
  ModalField() = default;
  ModalField(int nx, int ncomp, int degree)
      : nx_(nx), ncomp_(ncomp), degree_(degree),
        data_(static_cast<std::size_t>(nx) * ncomp * (degree + 1), 0.0) {}

  int nx() const { return nx_; }
  int ncomp() const { return ncomp_; }
  int degree() const { return degree_; }
  int modes() const { return degree_ + 1; }

  double& coeff(int j, int c, int m) { return data_[index(j, c, m)]; }
  double coeff(int j, int c, int m) const { return data_[index(j, c, m)]; }

  double* cell_data(int j) { return data_.data() + index(j, 0, 0); }
  const double* cell_data(int j) const { return data_.data() + index(j, 0, 0); }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Value of every component at local coordinate xi in cell j.
  StateVec evaluate(int j, double xi) const;
  /// Spatial derivative (chain-ruled by 2/dx) of every component.
  StateVec evaluate_derivative(int j, double xi, double dx) const;
  /// Single component value.
  double evaluate(int j, int c, double xi) const;
  double evaluate_derivative(int j, int c, double xi, double dx) const;

  /// Cell average of component c (first modal coefficient rescaled).
  double cell_average(int j, int c) const;

 private:
  std::size_t index(int j, int c, int m) const {
    return (static_cast<std::size_t>(j) * ncomp_ + c) * (degree_ + 1) + m;
  }

  int nx_ = 0;
  int ncomp_ = 0;
  int degree_ = 0;
  std::vector<double> data_;
};

/// out = a*x + b*y, elementwise over all coefficients.
void lin_comb(double a, const ModalField& x, double b, const ModalField& y,
              ModalField& out);

//-----------------------------------------------------------------------------
// Projection and norms
//-----------------------------------------------------------------------------

/// L2 projection of a pointwise function onto the modal space. The function
/// receives a physical coordinate and returns ncomp values.
ModalField l2_project(const std::function<StateVec(double)>& fn, const Mesh& mesh,
                      int ncomp, int degree, const GaussRule& rule);

/// Scalar overload.
ModalField l2_project(const std::function<double(double)>& fn, const Mesh& mesh,
                      int degree, const GaussRule& rule);

struct ErrorNorms {
  double l1 = 0.0;
  double linf = 0.0;
};

/// L1 (quadrature-weighted) and Linf (quadrature nodes plus one-sided cell
/// interface traces) norms of the difference between two cell-local
/// evaluators a(j, xi) and b(j, xi).
ErrorNorms error_norms(const Mesh& mesh, const GaussRule& rule,
                       const std::function<double(int, double)>& a,
                       const std::function<double(int, double)>& b);

/// Cell-local evaluator for a component of a modal field on a finer nested
/// mesh: maps (coarse cell, xi) into the fine field. fine.nx() must be a
/// multiple of coarse_nx.
std::function<double(int, double)> nested_evaluator(const ModalField& fine,
                                                    int fine_comp, int coarse_nx);

}  // namespace swlme
