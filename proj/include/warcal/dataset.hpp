#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace warcal {

// Binary class labels. Target encodes to +1, NonTarget to -1; real-valued
// decision values are thresholded at 0 and ties go to NonTarget.
enum class Label { Target, NonTarget };

inline double label_value(Label l) { return l == Label::Target ? 1.0 : -1.0; }
inline Label label_from_value(double v) {
  return v > 0.0 ? Label::Target : Label::NonTarget;
}
inline char label_char(Label l) { return l == Label::Target ? 'T' : 'N'; }

// One existing subject's labeled data: one feature row per sample.
struct SourceDomain {
  std::string id;
  Eigen::MatrixXd x;     // n x d
  std::vector<Label> y;  // length n

  int count(Label c) const;
};

// The new subject's state: labeled rows collected so far plus, in offline
// mode, the unlabeled pool. pseudo_labels, when present, cover the pool.
struct TargetState {
  Eigen::MatrixXd x_labeled;  // m_l x d
  std::vector<Label> y_labeled;
  Eigen::MatrixXd x_unlabeled;  // m_u x d (0 rows in online mode)
  std::optional<std::vector<Label>> pseudo_labels;  // length m_u when set

  int labeled_count(Label c) const;
};

struct WeightAssignment {
  Eigen::VectorXd source;      // length n, all > 0
  double target_overall = 1.0; // >= 1
  Eigen::VectorXd target;      // length m_l, all > 0
};

// Class-balance weights for the source rows: 1 for Target samples,
// n1/(n-n1) for NonTarget samples, so both classes carry equal total
// weight. Throws MissingClassError if a class is absent.
Eigen::VectorXd source_sample_weights(const SourceDomain& domain);

// Same balancing for the labeled target rows. When only one class has
// been labeled so far the correction is undefined and all weights are 1.
Eigen::VectorXd target_sample_weights(const TargetState& target);

// Diagonal of the loss-weight matrix over the stacked sample order
// (source rows, then labeled target rows, then unlabeled target rows).
// Unlabeled rows carry weight 0.
Eigen::VectorXd loss_weight_diagonal(const WeightAssignment& weights, int n,
                                     int m_l, int m_u);

}  // namespace warcal
