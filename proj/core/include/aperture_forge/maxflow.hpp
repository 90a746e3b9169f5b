#pragma once

#include <deque>
#include <vector>

namespace apf {

// Boykov-Kolmogorov max-flow on a graph with terminal edges, for
// non-negative capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);

  int node_count() const { return static_cast<int>(nodes_.size()); }

  // Capacity from the source to i and from i to the sink. Accumulates.
  void add_terminal(int i, double source_cap, double sink_cap);
  // Edge i -> j with capacity cap and j -> i with capacity rev_cap.
  void add_edge(int i, int j, double cap, double rev_cap = 0.0);

  double solve();

  // After solve(): whether i is on the sink side of the minimum cut.
  bool in_sink(int i) const;

 private:
  enum class Tree : unsigned char { none, source, sink };
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  struct Arc {
    int head;
    int next;
    double cap;
  };
  struct Node {
    int first = -1;
    int parent = kNone;
    Tree tree = Tree::none;
    bool active = false;
    double tr_cap = 0.0;  // > 0: residual from the source, < 0: to the sink
  };

  static int sister(int a) { return a ^ 1; }
  void check_node(int i) const;
  void activate(int i);
  int grow(int i);
  void augment(int middle);
  bool rooted(int i) const;
  void adopt();

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  double flow_ = 0.0;
  double offset_ = 0.0;
  bool solved_ = false;
};

}  // namespace apf
