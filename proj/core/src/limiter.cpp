#include "swlme/limiter.hpp"

#include <cmath>
#include <vector>

namespace swlme {

double tvb_minmod(double a, double b, double c, double threshold) {
  if (std::abs(a) <= threshold) return a;
  if ((a > 0.0) != (b > 0.0) || (b > 0.0) != (c > 0.0)) return 0.0;
  const double mag = std::min({std::abs(a), std::abs(b), std::abs(c)});
  return a > 0.0 ? mag : -mag;
}

Eigen::MatrixXd equilibrium_variable_jacobian(const ConservativeState& u, double g,
                                              LimiterTransform kind) {
  const int n = u.n_moments();
  const int nc = n + 2;
  if (kind == LimiterTransform::surface) return Eigen::MatrixXd::Identity(nc, nc);

  const double h = u.h();
  const double um = u.velocity();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nc, nc);
  double e_h = g - um * um / h;
  for (int i = 1; i <= n; ++i) {
    const double ai = u.alpha(i);
    e_h -= 3.0 * ai * ai / ((2.0 * i + 1.0) * h);
    t(0, 1 + i) = 3.0 * ai / ((2.0 * i + 1.0) * h);
    t(1 + i, 0) = -2.0 * ai / (h * h);
    t(1 + i, 1 + i) = 1.0 / (h * h);
  }
  t(0, 0) = e_h;
  t(0, 1) = um / h;
  t(1, 1) = 1.0;
  return t;
}

namespace {

// Eigenvectors per eigenvalue via kernel solves; the eigenvalues themselves
// are the analytic wave speeds carried over by similarity.
bool kernel_decomposition(const Eigen::MatrixXd& a, double um, double c,
                          int n_moments, Eigen::MatrixXd& vectors,
                          Eigen::VectorXd& values) {
  const int nc = static_cast<int>(a.rows());
  vectors.resize(nc, nc);
  values.resize(nc);
  int col = 0;
  const double lambdas[3] = {um - c, um, um + c};
  const int mult[3] = {1, n_moments, 1};
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(nc, nc);
  for (int t = 0; t < 3; ++t) {
    if (mult[t] == 0) continue;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a - lambdas[t] * eye);
    const Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() != mult[t]) return false;
    for (int k = 0; k < ker.cols(); ++k) {
      vectors.col(col) = ker.col(k).normalized();
      values[col] = lambdas[t];
      ++col;
    }
  }
  return col == nc;
}

bool full_decomposition(const Eigen::MatrixXd& a, Eigen::MatrixXd& vectors,
                        Eigen::VectorXd& values) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) return false;
  vectors = solver.eigenvectors().real();
  values = solver.eigenvalues().real();
  // Complex parts should be rounding noise; reject otherwise.
  const double scale = a.cwiseAbs().maxCoeff() + 1.0;
  if (solver.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-8 * scale) return false;
  return true;
}

bool verify_frame(const Eigen::MatrixXd& a, CharacteristicFrame& frame) {
  const double norm_a = a.cwiseAbs().maxCoeff();
  const double resid =
      (a * frame.vectors - frame.vectors * frame.values.asDiagonal().toDenseMatrix())
          .cwiseAbs()
          .maxCoeff();
  if (resid > 1e-10 * std::max(norm_a, 1.0)) return false;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(frame.vectors);
  if (!lu.isInvertible()) return false;
  frame.inverse = lu.inverse();
  frame.condition = frame.vectors.cwiseAbs().rowwise().sum().maxCoeff() *
                    frame.inverse.cwiseAbs().rowwise().sum().maxCoeff();
  return frame.condition < 1e12;
}

}  // namespace

CharacteristicFrame interface_char_matrix(const ConservativeState& u_left,
                                          const ConservativeState& u_right,
                                          double g, LimiterTransform kind) {
  const int n = u_left.n_moments();
  CharacteristicFrame frame;

  ConservativeState mean(n);
  for (int c = 0; c < n + 3; ++c) mean.q[c] = 0.5 * (u_left.q[c] + u_right.q[c]);
  if (!(mean.h() > 0.0)) {
    frame.componentwise = true;
    return frame;
  }

  Eigen::MatrixXd a_char = jacobian(mean, g);
  if (kind == LimiterTransform::equilibrium) {
    const Eigen::MatrixXd t = equilibrium_variable_jacobian(mean, g, kind);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
    if (!lu.isInvertible()) {
      // Sonic mean state: dE/dh row degenerates; limit componentwise.
      frame.componentwise = true;
      return frame;
    }
    a_char = t * a_char * lu.inverse();
  }

  double c2 = g * mean.h();
  for (int i = 1; i <= n; ++i) {
    const double ai = mean.alpha(i);
    c2 += 3.0 * ai * ai / (2.0 * i + 1.0);
  }
  const double um = mean.velocity();
  const double c = std::sqrt(c2);

  if (kernel_decomposition(a_char, um, c, n, frame.vectors, frame.values) &&
      verify_frame(a_char, frame)) {
    return frame;
  }
  if (full_decomposition(a_char, frame.vectors, frame.values) &&
      verify_frame(a_char, frame)) {
    return frame;
  }
  frame.componentwise = true;
  return frame;
}

int TvbLimiter::apply(ModalField& field, const Mesh& mesh, BoundaryKind bc,
                      int n_limit,
                      const std::function<ConservativeState(const ModalField&, int)>& mean_state,
                      LimiterTransform kind) const {
  const int k = field.degree();
  if (k == 0) return 0;
  const int nx = field.nx();
  const double threshold = m_tvb_ * mesh.dx * mesh.dx;
  const double phi1_at_one = basis::value(1, 1.0);  // sqrt(3/2)

  // Gather averages and traces of the limited components before touching
  // anything, so limiting never reads a modified neighbor.
  std::vector<double> avg(static_cast<std::size_t>(nx) * n_limit);
  std::vector<double> tr_l(avg.size()), tr_r(avg.size());
  for (int j = 0; j < nx; ++j) {
    for (int c = 0; c < n_limit; ++c) {
      avg[j * n_limit + c] = field.cell_average(j, c);
      tr_l[j * n_limit + c] = field.evaluate(j, c, -1.0);
      tr_r[j * n_limit + c] = field.evaluate(j, c, 1.0);
    }
  }
  auto neighbor = [&](int j) {
    if (j < 0) return bc == BoundaryKind::periodic ? nx + j : 0;
    if (j >= nx) return bc == BoundaryKind::periodic ? j - nx : nx - 1;
    return j;
  };

  Eigen::VectorXd dev_r(n_limit), dev_l(n_limit), dfwd(n_limit), dbwd(n_limit);
  Eigen::VectorXd cr(n_limit), cl(n_limit), cf(n_limit), cb(n_limit), slope(n_limit);
  int limited = 0;

  for (int j = 0; j < nx; ++j) {
    const int jm = neighbor(j - 1);
    const int jp = neighbor(j + 1);
    bool any_dev = false;
    double phys_scale = 1.0;
    for (int c = 0; c < n_limit; ++c) {
      dev_r[c] = tr_r[j * n_limit + c] - avg[j * n_limit + c];
      dev_l[c] = avg[j * n_limit + c] - tr_l[j * n_limit + c];
      dfwd[c] = avg[jp * n_limit + c] - avg[j * n_limit + c];
      dbwd[c] = avg[j * n_limit + c] - avg[jm * n_limit + c];
      any_dev = any_dev || dev_r[c] != 0.0 || dev_l[c] != 0.0 || dfwd[c] != 0.0 ||
                dbwd[c] != 0.0;
      phys_scale = std::max(phys_scale, std::abs(avg[j * n_limit + c]));
    }
    if (!any_dev) continue;  // constant data: limiter deactivated

    const CharacteristicFrame frame =
        interface_char_matrix(mean_state(field, jm), mean_state(field, jp), g_, kind);
    if (frame.componentwise) {
      cr = dev_r; cl = dev_l; cf = dfwd; cb = dbwd;
    } else {
      cr = frame.inverse * dev_r;
      cl = frame.inverse * dev_l;
      cf = frame.inverse * dfwd;
      cb = frame.inverse * dbwd;
    }

    // Deviations at rounding level (projection noise of an equilibrium, or
    // the re-expansion of an already limited slope) must not trip the flag;
    // the floor scales with the transform rows applied to the data.
    bool troubled = false;
    for (int c = 0; c < n_limit && !troubled; ++c) {
      const double row_norm =
          frame.componentwise ? 1.0 : frame.inverse.row(c).cwiseAbs().sum();
      const double floor = 1e-12 * phys_scale * row_norm;
      troubled =
          std::abs(tvb_minmod(cr[c], cf[c], cb[c], threshold) - cr[c]) > floor ||
          std::abs(tvb_minmod(cl[c], cf[c], cb[c], threshold) - cl[c]) > floor;
    }
    if (!troubled) continue;

    // Limited linear reconstruction: minmod of the linear-part slope against
    // the neighbor average differences, in characteristic variables.
    for (int c = 0; c < n_limit; ++c) slope[c] = field.coeff(j, c, 1) * phi1_at_one;
    if (!frame.componentwise) slope = frame.inverse * slope;
    for (int c = 0; c < n_limit; ++c) {
      slope[c] = tvb_minmod(slope[c], cf[c], cb[c], threshold);
    }
    if (!frame.componentwise) slope = frame.vectors * slope;
    for (int c = 0; c < n_limit; ++c) {
      field.coeff(j, c, 1) = slope[c] / phi1_at_one;
      for (int m = 2; m <= k; ++m) field.coeff(j, c, m) = 0.0;
    }
    ++limited;
  }
  return limited;
}

}  // namespace swlme
