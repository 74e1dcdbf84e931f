#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace minheat {

// Reference data for one panel order: Lobatto nodes on [-1, 1] plus the
// Gauss points used for integrals of nonlinear expressions of a profile.
struct PanelBasis {
  int order = 0;
  std::vector<double> nodes;    // Lobatto nodes, size order
  std::vector<double> weights;  // Lobatto weights
  std::vector<double> bary;
  std::vector<double> diff;     // order x order, d/dx on [-1, 1]
  std::vector<double> gauss_nodes;
  std::vector<double> gauss_weights;
  std::vector<double> gauss_interp;  // gauss x order
  std::vector<double> gauss_deriv;   // gauss x order, d/dx on [-1, 1]
  std::vector<double> to_monomial;   // order x order, nodal values -> coefficients of x^n
};

// Monomial coefficients (in the panel coordinate x in [-1, 1]) of the
// interpolant through the given panel nodal values.
std::vector<double> panel_monomial(const PanelBasis& basis, const double* nodal);

const PanelBasis& panel_basis(int order);

// Composite grid on [0, r_max]: panels between consecutive breakpoints, each
// carrying `order` Lobatto nodes. Neighbouring panels share their endpoint
// node, so the merged node list is strictly increasing and starts at 0.
// A profile on the grid is the piecewise polynomial through its nodal values.
class RadialGrid {
public:
  RadialGrid(std::vector<double> breaks, int order);

  // Equal-width panels inside each segment [0, e0], [e0, e1], ..., the panel
  // budget split in proportion to segment length (at least one per segment).
  static RadialGrid segmented(std::span<const double> segment_ends, std::size_t n_panels,
                              int order);

  int order() const { return order_; }
  std::size_t panel_count() const { return breaks_.size() - 1; }
  std::size_t size() const { return nodes_.size(); }
  double r_max() const { return breaks_.back(); }

  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> nodes() const { return nodes_; }

  std::size_t first_node(std::size_t panel) const {
    return panel * static_cast<std::size_t>(order_ - 1);
  }
  double panel_lo(std::size_t panel) const { return breaks_[panel]; }
  double panel_hi(std::size_t panel) const { return breaks_[panel + 1]; }

  // Panel containing r (clamped to the grid).
  std::size_t find_panel(double r) const;

  // Each panel split into `factor` equal sub-panels of the same order.
  RadialGrid refined(int factor) const;
  // Same shape with every radius multiplied by s.
  RadialGrid scaled(double s) const;

  const PanelBasis& basis() const { return *basis_; }

  bool operator==(const RadialGrid& other) const {
    return order_ == other.order_ && breaks_ == other.breaks_;
  }

private:
  std::vector<double> breaks_;
  int order_;
  std::vector<double> nodes_;
  const PanelBasis* basis_;
};

} // namespace minheat
