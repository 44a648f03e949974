#pragma once

#include <Eigen/Dense>
#include <functional>

#include "swlme/modal.hpp"
#include "swlme/model.hpp"
#include "swlme/pcdg.hpp"

// TVB minmod limiting on local characteristic fields of the equilibrium
// variables, with troubled-cell detection and automatic deactivation at
// steady states.

namespace swlme {

/// Which equilibrium-variable transform the characteristic frame uses.
enum class LimiterTransform {
  equilibrium,  ///< v^e = (E, m_a, a_i/h) over u^e = (h, m_a, m_i)
  surface       ///< w = (H, m_a, m_i); the transform is the identity
};

/// Eigen-decomposition of the transformed interface matrix
/// T A T^{-1} with T = dv^e/du^e, evaluated at the arithmetic mean of the
/// left and right states. Falls back to componentwise limiting (flagged)
/// when the frame is sonic or numerically defective.
struct CharacteristicFrame {
  Eigen::MatrixXd vectors;
  Eigen::MatrixXd inverse;
  Eigen::VectorXd values;
  double condition = 0.0;
  bool componentwise = false;
};

CharacteristicFrame interface_char_matrix(const ConservativeState& u_left,
                                          const ConservativeState& u_right,
                                          double g, LimiterTransform kind);

/// dv^e/du^e at the given state (identity for the surface transform).
Eigen::MatrixXd equilibrium_variable_jacobian(const ConservativeState& u, double g,
                                              LimiterTransform kind);

/// TVB-modified minmod: returns a when |a| <= threshold, else minmod(a,b,c).
double tvb_minmod(double a, double b, double c, double threshold);

class TvbLimiter {
 public:
  TvbLimiter(double m_tvb, double g) : m_tvb_(m_tvb), g_(g) {}

  /// Two-pass TVB limiting of the first n_limit components of the field on
  /// local characteristic variables. mean_state(field, j) supplies the cell's
  /// mean conservative state (used only for frame construction). Flagged
  /// cells are replaced by the limited linear reconstruction; cell averages
  /// are preserved exactly. Returns the number of limited cells.
  int apply(ModalField& field, const Mesh& mesh, BoundaryKind bc, int n_limit,
            const std::function<ConservativeState(const ModalField&, int)>& mean_state,
            LimiterTransform kind) const;

  double tvb_constant() const { return m_tvb_; }

 private:
  double m_tvb_;
  double g_;
};

}  // namespace swlme
