#include "swlme/modal.hpp"

#include <cmath>
#include <stdexcept>

namespace swlme {

namespace basis {

namespace {
double norm_factor(int m) { return std::sqrt(m + 0.5); }
}  // namespace

double value(int m, double xi) {
  double p0 = 1.0, p1 = xi;
  if (m == 0) return norm_factor(0);
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return norm_factor(m) * p1;
}

double derivative(int m, double xi) {
  if (m == 0) return 0.0;
  // dP_m via the recurrence dP_m = dP_{m-2} + (2m-1) P_{m-1}.
  double p0 = 1.0, p1 = xi;
  double d0 = 0.0, d1 = 1.0;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
    const double d2 = d0 + (2.0 * k - 1.0) * p1;
    p0 = p1; p1 = p2;
    d0 = d1; d1 = d2;
  }
  return norm_factor(m) * d1;
}

void values(int k, double xi, double* out) {
  double p0 = 1.0, p1 = xi;
  out[0] = norm_factor(0);
  if (k >= 1) out[1] = norm_factor(1) * xi;
  for (int m = 2; m <= k; ++m) {
    const double p2 = ((2.0 * m - 1.0) * xi * p1 - (m - 1.0) * p0) / m;
    p0 = p1; p1 = p2;
    out[m] = norm_factor(m) * p2;
  }
}

void derivatives(int k, double xi, double* out) {
  double p0 = 1.0, p1 = xi;
  double d0 = 0.0, d1 = 1.0;
  out[0] = 0.0;
  if (k >= 1) out[1] = norm_factor(1);
  for (int m = 2; m <= k; ++m) {
    const double p2 = ((2.0 * m - 1.0) * xi * p1 - (m - 1.0) * p0) / m;
    const double d2 = d0 + (2.0 * m - 1.0) * p1;
    p0 = p1; p1 = p2;
    d0 = d1; d1 = d2;
    out[m] = norm_factor(m) * d2;
  }
}

}  // namespace basis

//-----------------------------------------------------------------------------
// ModalField
//-----------------------------------------------------------------------------

StateVec ModalField::evaluate(int j, double xi) const {
  double phi[kMaxComponents];
  basis::values(degree_, xi, phi);
  StateVec out(ncomp_);
  const double* cell = cell_data(j);
  for (int c = 0; c < ncomp_; ++c) {
    double acc = 0.0;
    const double* coeffs = cell + c * (degree_ + 1);
    for (int m = 0; m <= degree_; ++m) acc += coeffs[m] * phi[m];
    out[c] = acc;
  }
  return out;
}

StateVec ModalField::evaluate_derivative(int j, double xi, double dx) const {
  double dphi[kMaxComponents];
  basis::derivatives(degree_, xi, dphi);
  const double scale = 2.0 / dx;
  StateVec out(ncomp_);
  const double* cell = cell_data(j);
  for (int c = 0; c < ncomp_; ++c) {
    double acc = 0.0;
    const double* coeffs = cell + c * (degree_ + 1);
    for (int m = 1; m <= degree_; ++m) acc += coeffs[m] * dphi[m];
    out[c] = acc * scale;
  }
  return out;
}

double ModalField::evaluate(int j, int c, double xi) const {
  double phi[kMaxComponents];
  basis::values(degree_, xi, phi);
  double acc = 0.0;
  for (int m = 0; m <= degree_; ++m) acc += coeff(j, c, m) * phi[m];
  return acc;
}

double ModalField::evaluate_derivative(int j, int c, double xi, double dx) const {
  double dphi[kMaxComponents];
  basis::derivatives(degree_, xi, dphi);
  double acc = 0.0;
  for (int m = 1; m <= degree_; ++m) acc += coeff(j, c, m) * dphi[m];
  return acc * 2.0 / dx;
}

double ModalField::cell_average(int j, int c) const {
  // average = (1/dx) int u dx = coeff_0 * phi_0 = coeff_0 / sqrt(2)
  return coeff(j, c, 0) * std::sqrt(0.5);
}

void lin_comb(double a, const ModalField& x, double b, const ModalField& y,
              ModalField& out) {
  const std::size_t n = x.data().size();
  if (y.data().size() != n || out.data().size() != n) {
    throw std::invalid_argument("lin_comb: field shape mismatch");
  }
  const double* px = x.data().data();
  const double* py = y.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < n; ++i) po[i] = a * px[i] + b * py[i];
}

//-----------------------------------------------------------------------------
// Projection and norms
//-----------------------------------------------------------------------------

ModalField l2_project(const std::function<StateVec(double)>& fn, const Mesh& mesh,
                      int ncomp, int degree, const GaussRule& rule) {
  ModalField field(mesh.nx, ncomp, degree);
  const int nq = rule.size();
  std::vector<double> phi(static_cast<std::size_t>(nq) * (degree + 1));
  for (int q = 0; q < nq; ++q) {
    basis::values(degree, rule.node(q), &phi[q * (degree + 1)]);
  }
  const double sqrt2 = std::sqrt(2.0);
  std::vector<StateVec> nodal(nq);
  for (int j = 0; j < mesh.nx; ++j) {
    for (int q = 0; q < nq; ++q) nodal[q] = fn(mesh.to_x(j, rule.node(q)));
    // Accumulate against the first nodal value as anchor, so data that is
    // constant within the cell projects to exactly one nonzero mode (the
    // quadrature sums of the higher basis functions carry rounding noise
    // that would otherwise seed every mode).
    for (int c = 0; c < ncomp; ++c) {
      const double anchor = nodal[0][c];
      for (int q = 0; q < nq; ++q) {
        const double df = nodal[q][c] - anchor;
        if (df == 0.0) continue;
        const double* ph = &phi[q * (degree + 1)];
        for (int m = 0; m <= degree; ++m) {
          field.coeff(j, c, m) += rule.weight(q) * df * ph[m];
        }
      }
      field.coeff(j, c, 0) += anchor * sqrt2;
    }
  }
  return field;
}

ModalField l2_project(const std::function<double(double)>& fn, const Mesh& mesh,
                      int degree, const GaussRule& rule) {
  return l2_project([&fn](double x) { return StateVec{fn(x)}; }, mesh, 1, degree, rule);
}

ErrorNorms error_norms(const Mesh& mesh, const GaussRule& rule,
                       const std::function<double(int, double)>& a,
                       const std::function<double(int, double)>& b) {
  ErrorNorms norms;
  for (int j = 0; j < mesh.nx; ++j) {
    for (int q = 0; q < rule.size(); ++q) {
      const double diff = std::abs(a(j, rule.node(q)) - b(j, rule.node(q)));
      norms.l1 += rule.weight(q) * diff * 0.5 * mesh.dx;
      norms.linf = std::max(norms.linf, diff);
    }
    for (double xi : {-1.0, 1.0}) {
      const double diff = std::abs(a(j, xi) - b(j, xi));
      norms.linf = std::max(norms.linf, diff);
    }
  }
  return norms;
}

std::function<double(int, double)> nested_evaluator(const ModalField& fine,
                                                    int fine_comp, int coarse_nx) {
  if (fine.nx() % coarse_nx != 0) {
    throw std::invalid_argument("nested_evaluator: fine mesh does not nest in coarse mesh");
  }
  const int ratio = fine.nx() / coarse_nx;
  return [&fine, fine_comp, ratio](int j, double xi) {
    // Position within the coarse cell in [0, ratio); trace at xi = 1 maps to
    // the left trace of the last sub-cell.
    const double t = 0.5 * (xi + 1.0) * ratio;
    int sub = static_cast<int>(t);
    if (sub >= ratio) sub = ratio - 1;
    const double xi_f = 2.0 * (t - sub) - 1.0;
    return fine.evaluate(j * ratio + sub, fine_comp, xi_f);
  };
}

}  // namespace swlme
